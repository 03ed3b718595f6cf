"""Cell and face incidence tables shared by the pure and compiled marching
kernels.

Cell corners 0..7 sit at offsets (di, dj, dk) of CORNER_OFFSETS; cell edges
0..11 follow the usual marching-cubes numbering (EDGE_BASE holds the grid
offset of each edge's low endpoint, EDGE_AXIS its direction).  Each of the
6 cell faces is described in a canonical 2D frame whose normal is the
positive grid axis (z-faces: u=x,v=y; y-faces: u=z,v=x; x-faces: u=y,v=z),
with corners P00,P10,P11,P01 and edge slots s0..s3 = (P00P10, P10P11,
P01P11, P00P01).  Because the frame is defined by global axes, the two
cells sharing a face see its corners in the same order, so the ambiguity
decider computes bit-identical results on both sides.

SEGMENTS maps a face's 4-bit inside code to directed crossings
(from_slot, to_slot).  Directions are canonical for faces whose outward
normal is the negative axis and must be reversed for positive-axis faces
(FACE_REVERSE); this puts the solid on the consistent side so triangle
fans come out counter-clockwise viewed from outside.  Codes 5 and 10 are
the ambiguous diagonal cases, resolved at runtime by the asymptotic
decider; SEGMENTS stores their "separated" resolution and SEGMENTS_JOINED
the "joined" one.
"""

import numpy as np

CORNER_OFFSETS = np.array(
    [
        (0, 0, 0),
        (1, 0, 0),
        (1, 1, 0),
        (0, 1, 0),
        (0, 0, 1),
        (1, 0, 1),
        (1, 1, 1),
        (0, 1, 1),
    ],
    dtype=np.int8,
)

EDGE_AXIS = np.array([0, 1, 0, 1, 0, 1, 0, 1, 2, 2, 2, 2], dtype=np.int8)

EDGE_BASE = np.array(
    [
        (0, 0, 0),  # e0  x-edge
        (1, 0, 0),  # e1  y-edge
        (0, 1, 0),  # e2  x-edge
        (0, 0, 0),  # e3  y-edge
        (0, 0, 1),  # e4  x-edge
        (1, 0, 1),  # e5  y-edge
        (0, 1, 1),  # e6  x-edge
        (0, 0, 1),  # e7  y-edge
        (0, 0, 0),  # e8  z-edge
        (1, 0, 0),  # e9  z-edge
        (1, 1, 0),  # e10 z-edge
        (0, 1, 0),  # e11 z-edge
    ],
    dtype=np.int8,
)

# face -> corner ids (P00, P10, P11, P01) in the canonical +axis frame
FACE_CORNERS = np.array(
    [
        (0, 1, 2, 3),  # F0 bottom (z = k,   outward -z)
        (4, 5, 6, 7),  # F1 top    (z = k+1, outward +z)
        (0, 4, 5, 1),  # F2 front  (y = j,   outward -y)
        (3, 7, 6, 2),  # F3 back   (y = j+1, outward +y)
        (0, 3, 7, 4),  # F4 left   (x = i,   outward -x)
        (1, 2, 6, 5),  # F5 right  (x = i+1, outward +x)
    ],
    dtype=np.int8,
)

# face -> cell edge id of slots (s0, s1, s2, s3)
FACE_SLOT_EDGES = np.array(
    [
        (0, 1, 2, 3),
        (4, 5, 6, 7),
        (8, 4, 9, 0),
        (11, 6, 10, 2),
        (3, 11, 7, 8),
        (1, 10, 5, 9),
    ],
    dtype=np.int8,
)

FACE_REVERSE = np.array([0, 1, 0, 1, 0, 1], dtype=np.int8)

_NO = (-1, -1)

# code -> up to two directed (from_slot, to_slot) crossings; ambiguous codes
# 5 and 10 hold their "separated" resolution here.
SEGMENTS = np.array(
    [
        (_NO, _NO),          # 0
        ((0, 3), _NO),       # 1: P00
        ((1, 0), _NO),       # 2: P10
        ((1, 3), _NO),       # 3: bottom half
        ((2, 1), _NO),       # 4: P11
        ((0, 3), (2, 1)),    # 5: diagonal P00+P11, separated
        ((2, 0), _NO),       # 6: right half
        ((2, 3), _NO),       # 7: all but P01
        ((3, 2), _NO),       # 8: P01
        ((0, 2), _NO),       # 9: left half
        ((1, 0), (3, 2)),    # 10: diagonal P10+P01, separated
        ((1, 2), _NO),       # 11: all but P11
        ((3, 1), _NO),       # 12: top half
        ((0, 1), _NO),       # 13: all but P10
        ((3, 0), _NO),       # 14: all but P00
        (_NO, _NO),          # 15
    ],
    dtype=np.int8,
)

# joined resolutions for the two ambiguous codes
SEGMENTS_JOINED = np.array(
    [
        ((0, 1), (2, 3)),    # code 5 joined
        ((3, 0), (1, 2)),    # code 10 joined
    ],
    dtype=np.int8,
)

# bitmask of the two faces each cell edge belongs to.  A triangulation
# diagonal between two loop vertices is safe only when their edges share no
# face: vertices on a common face can be paired again by the neighboring
# cell (as its own diagonal, or as a segment), which would put 3 or 4
# triangles on one undirected edge.  Loops with no safe fan apex fall back
# to a centroid fan, whose interior edges are private by construction.
EDGE_FACES = np.array(
    [
        (1 << 0) | (1 << 2),  # e0:  bottom, front
        (1 << 0) | (1 << 5),  # e1:  bottom, right
        (1 << 0) | (1 << 3),  # e2:  bottom, back
        (1 << 0) | (1 << 4),  # e3:  bottom, left
        (1 << 1) | (1 << 2),  # e4:  top, front
        (1 << 1) | (1 << 5),  # e5:  top, right
        (1 << 1) | (1 << 3),  # e6:  top, back
        (1 << 1) | (1 << 4),  # e7:  top, left
        (1 << 2) | (1 << 4),  # e8:  front, left
        (1 << 2) | (1 << 5),  # e9:  front, right
        (1 << 3) | (1 << 5),  # e10: back, right
        (1 << 3) | (1 << 4),  # e11: back, left
    ],
    dtype=np.int16,
)
