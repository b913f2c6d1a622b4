# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled feature kernels.

Same contract and arithmetic as ``signstream.features._reference``; the
parity test in the suite holds the two within 1e-12.
"""

from libc.math cimport sqrt
from libc.string cimport memset

import numpy as np

cdef double DEGENERATE_SCALE = 1e-6
cdef double DEGENERATE_NORM = 1e-12

cdef int[20] BONE_PARENT = [0, 1, 2, 3, 0, 5, 6, 7, 0, 9, 10, 11, 0, 13, 14, 15, 0, 17, 18, 19]
cdef int[20] BONE_CHILD = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20]

cdef int WRIST = 0
cdef int INDEX_MCP = 5
cdef int PINKY_MCP = 17
cdef int MIDDLE_MCP = 9
cdef int LEFT_SHOULDER = 11
cdef int RIGHT_SHOULDER = 12


cdef inline double _dist3(const double* a, const double* b) noexcept nogil:
    cdef double dx = a[0] - b[0]
    cdef double dy = a[1] - b[1]
    cdef double dz = a[2] - b[2]
    return sqrt(dx * dx + dy * dy + dz * dz)


cdef inline void _sub3(const double* a, const double* b, double* out) noexcept nogil:
    out[0] = a[0] - b[0]
    out[1] = a[1] - b[1]
    out[2] = a[2] - b[2]


cdef inline void _cross3(const double* a, const double* b, double* out) noexcept nogil:
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]


cdef inline void _unit3(double* v) noexcept nogil:
    cdef double norm = sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if norm < DEGENERATE_NORM:
        v[0] = 0.0
        v[1] = 0.0
        v[2] = 0.0
    else:
        v[0] /= norm
        v[1] /= norm
        v[2] /= norm


cdef inline double _dot3(const double* a, const double* b) noexcept nogil:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


cdef inline double _clip1(double x) noexcept nogil:
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


cdef void _body_frame(const double[:, ::1] pose, double* origin, double* scale) noexcept nogil:
    cdef double d
    origin[0] = 0.5 * (pose[LEFT_SHOULDER, 0] + pose[RIGHT_SHOULDER, 0])
    origin[1] = 0.5 * (pose[LEFT_SHOULDER, 1] + pose[RIGHT_SHOULDER, 1])
    origin[2] = 0.5 * (pose[LEFT_SHOULDER, 2] + pose[RIGHT_SHOULDER, 2])
    d = _dist3(&pose[LEFT_SHOULDER, 0], &pose[RIGHT_SHOULDER, 0])
    scale[0] = 1.0 if d < DEGENERATE_SCALE else d


cdef void _location(const double[:, ::1] points, int n, const double* origin, double scale,
                    double[::1] out, int offset) noexcept nogil:
    cdef int i, k
    for i in range(n):
        for k in range(3):
            out[offset + 3 * i + k] = (points[i, k] - origin[k]) / scale


cdef void _handshape(const double[:, ::1] points, double[::1] out, int offset) noexcept nogil:
    cdef double ref = _dist3(&points[WRIST, 0], &points[MIDDLE_MCP, 0])
    cdef int i, j, idx
    if ref < DEGENERATE_SCALE:
        for idx in range(210):
            out[offset + idx] = 0.0
        return
    idx = 0
    for i in range(21):
        for j in range(i + 1, 21):
            out[offset + idx] = _dist3(&points[i, 0], &points[j, 0]) / ref
            idx += 1


cdef void _palm_orientation(const double[:, ::1] points, double[::1] out, int offset) noexcept nogil:
    cdef double[3] lateral
    cdef double[3] normal
    cdef double[3] distal
    cdef double[3] u
    cdef double[3] v
    cdef double[3] bone
    cdef int b

    _sub3(&points[INDEX_MCP, 0], &points[PINKY_MCP, 0], lateral)
    _unit3(lateral)
    _sub3(&points[INDEX_MCP, 0], &points[WRIST, 0], u)
    _sub3(&points[PINKY_MCP, 0], &points[WRIST, 0], v)
    _cross3(u, v, normal)
    _unit3(normal)
    _cross3(normal, lateral, distal)

    for b in range(20):
        _sub3(&points[BONE_CHILD[b], 0], &points[BONE_PARENT[b], 0], bone)
        _unit3(bone)
        out[offset + 5 * b + 0] = _clip1(_dot3(bone, normal))
        out[offset + 5 * b + 1] = _clip1(_dot3(bone, lateral))
        out[offset + 5 * b + 2] = _clip1(_dot3(bone, distal))
        out[offset + 5 * b + 3] = _clip1(bone[1])
        out[offset + 5 * b + 4] = _clip1(bone[2])


cdef void _displacement(const double[:, ::1] first, const double[:, ::1] last,
                        const double* origin_first, double scale_first,
                        const double* origin_last, double scale_last,
                        double[::1] out, int offset) noexcept nogil:
    cdef int i, k
    cdef double a, b
    for i in range(21):
        for k in range(3):
            a = (first[i, k] - origin_first[k]) / scale_first
            b = (last[i, k] - origin_last[k]) / scale_last
            out[offset + 3 * i + k] = b - a


def encode(double[::1] out,
           const double[:, ::1] first_left, const double[:, ::1] first_right,
           const double[:, ::1] first_pose, const double[:, ::1] last_left,
           const double[:, ::1] last_right, const double[:, ::1] last_pose,
           bint has_first_left, bint has_first_right, bint has_first_pose,
           bint has_last_left, bint has_last_right, bint has_last_pose):
    """Fill a 947-entry output vector from the endpoint frames of a window."""
    if out.shape[0] != 947:
        raise ValueError("output must have shape (947,)")

    cdef double[3] origin_last
    cdef double[3] origin_first
    cdef double scale_last = 1.0
    cdef double scale_first = 1.0

    memset(&out[0], 0, 947 * sizeof(double))
    origin_last[0] = origin_last[1] = origin_last[2] = 0.0
    origin_first[0] = origin_first[1] = origin_first[2] = 0.0

    with nogil:
        if has_last_pose:
            _body_frame(last_pose, origin_last, &scale_last)
        if has_first_pose:
            _body_frame(first_pose, origin_first, &scale_first)

        if has_last_left:
            _location(last_left, 21, origin_last, scale_last, out, 0)
            _handshape(last_left, out, 201)
            _palm_orientation(last_left, out, 621)
        if has_last_right:
            _location(last_right, 21, origin_last, scale_last, out, 63)
            _handshape(last_right, out, 411)
            _palm_orientation(last_right, out, 721)
        if has_last_pose:
            _location(last_pose, 25, origin_last, scale_last, out, 126)

        if has_first_left and has_last_left:
            _displacement(first_left, last_left, origin_first, scale_first,
                          origin_last, scale_last, out, 821)
        if has_first_right and has_last_right:
            _displacement(first_right, last_right, origin_first, scale_first,
                          origin_last, scale_last, out, 884)

    return np.asarray(out)
