"""Hand-labelled touching configurations: (name, A, pos_a, B, pos_b, expected overlap)."""

SQ = [(0, 0), (2, 0), (2, 2), (0, 2)]
TRI = [(0, 0), (4, 0), (0, 4)]
L = [(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)]  # notch [2,4]x[2,4]
U = [(0, 0), (6, 0), (6, 4), (4, 4), (4, 2), (2, 2), (2, 4), (0, 4)]  # slot [2,4]x[2,4]
BAR = [(0, 0), (6, 0), (6, 1), (0, 1)]
DIAMOND = [(2, 0), (4, 2), (2, 4), (0, 2)]
ARROW = [(0, 0), (4, 2), (0, 4), (2, 2)]  # reflex vertex at (2,2)

CASES = [
    ("shared edge side by side", SQ, (0, 0), SQ, (2, 0), False),
    ("shared edge stacked", SQ, (0, 0), SQ, (0, 2), False),
    ("shared corner", SQ, (0, 0), SQ, (2, 2), False),
    ("shared anti-diagonal corner", SQ, (0, 0), SQ, (-2, 2), False),
    ("identical", SQ, (0, 0), SQ, (0, 0), True),
    ("partial collinear edge, opposite sides", SQ, (0, 0), SQ, (2, 1), False),
    ("partial collinear edge, same side", SQ, (0, 0), BAR, (1, 0), True),
    ("full collinear edge, same side, nested widths", BAR, (0, 0), SQ, (2, 0), True),
    ("bar on top of bar, sharing long edge", BAR, (0, 0), BAR, (0, 1), False),
    ("bar sliding along bar by half", BAR, (0, 0), BAR, (3, 1), False),
    ("bar overlapping bar collinearly", BAR, (0, 0), BAR, (3, 0), True),
    ("triangle hypotenuse against triangle", TRI, (0, 0), [(4, 0), (4, 4), (0, 4)], (0, 0), False),
    ("triangle vertex touching square edge", TRI, (0, 0), SQ, (4, -1), False),
    ("square filling L notch", L, (0, 0), SQ, (2, 2), False),
    ("square in U slot", U, (0, 0), SQ, (2, 2), False),
    ("square shifted into U wall", U, (0, 0), SQ, (3, 2), True),
    ("square above U slot touching rim", U, (0, 0), SQ, (2, 4), False),
    ("diamond vertex on square edge", DIAMOND, (0, 0), SQ, (1, 4), False),
    ("diamond vertex on square corner", DIAMOND, (0, 0), SQ, (2, 4), False),
    ("diamond pierces square through edge", DIAMOND, (0, 0), SQ, (1, 3), True),
    ("vertex into reflex vertex, inside wedge", ARROW, (0, 0), [(0, 0), (2, 2), (0, 2)], (0, 0), False),
    ("crossing through a shared vertex", DIAMOND, (0, 0), [(0, 0), (4, 4), (0, 4)], (0, -2), True),
    ("contained strictly", SQ, (0, 0), [(0, 0), (6, 0), (6, 6), (0, 6)], (-2, -2), True),
    ("contained touching boundary from inside", SQ, (0, 0), [(0, 0), (6, 0), (6, 6), (0, 6)], (0, 0), True),
    ("L notch with square pushed one unit in", L, (0, 0), SQ, (1, 2), True),
    ("two L shapes interlocked", L, (0, 0), [(2, 2), (4, 2), (4, 6), (0, 6), (0, 4), (2, 4)], (0, 0), False),
    ("triangles touching tip to tip", TRI, (0, 0), TRI, (4, 0), False),
    ("triangle tip on hypotenuse", TRI, (0, 0), [(0, 0), (2, -2), (2, 0)], (2, 2), False),
]
