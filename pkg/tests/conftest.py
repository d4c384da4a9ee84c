import functools

import pytest

from codecraft.bb import build_planar_bb, css_from_matrices, load_config
from codecraft.gf2 import BitMatrix


def steane():
    h = BitMatrix.from_strings(["0001111", "0110011", "1010101"])
    return css_from_matrices(h, h)


def surface_d2():
    hx = BitMatrix.from_strings(["1111"])
    hz = BitMatrix.from_strings(["1100", "0011"])
    return css_from_matrices(hx, hz)


def surface_d3():
    # rotated 3x3 patch, qubits row-major
    hx = BitMatrix.from_supports([[0, 1, 3, 4], [4, 5, 7, 8], [2, 5], [3, 6]], 9)
    hz = BitMatrix.from_supports([[1, 2, 4, 5], [3, 4, 6, 7], [0, 1], [7, 8]], 9)
    return css_from_matrices(hx, hz)


def toric(L):
    n = 2 * L * L

    def h(x, y):
        return (x % L) + L * (y % L)

    def v(x, y):
        return L * L + (x % L) + L * (y % L)

    star = [[h(x, y), h(x - 1, y), v(x, y), v(x, y - 1)] for y in range(L) for x in range(L)]
    plaq = [[h(x, y), h(x, y + 1), v(x, y), v(x + 1, y)] for y in range(L) for x in range(L)]
    return css_from_matrices(BitMatrix.from_supports(star, n), BitMatrix.from_supports(plaq, n))


def shor():
    hx = BitMatrix.from_supports([[0, 1, 2, 3, 4, 5], [3, 4, 5, 6, 7, 8]], 9)
    hz = BitMatrix.from_supports([[0, 1], [1, 2], [3, 4], [4, 5], [6, 7], [7, 8]], 9)
    return css_from_matrices(hx, hz)


def quantum_hamming15():
    # [[15,7,3]]: both check matrices are the [15,11] Hamming parity checks
    rows = [sum(((j + 1) >> b & 1) << j for j in range(15)) for b in range(4)]
    h = BitMatrix(rows, 15)
    return css_from_matrices(h, h)


SMALL = {
    "steane": (steane, 3),
    "surface_d2": (surface_d2, 2),
    "surface_d3": (surface_d3, 3),
    "toric3": (lambda: toric(3), 3),
    "shor": (shor, 3),
    "hamming15": (quantum_hamming15, 3),
}


@functools.lru_cache(maxsize=None)
def bundled(name):
    return build_planar_bb(load_config(name))


@pytest.fixture(scope="session")
def code54():
    return bundled("54")[0]


@pytest.fixture(scope="session")
def code180():
    return bundled("180")[0]


@pytest.fixture(scope="session")
def basis54(code54):
    from codecraft.report import resolve_basis

    return resolve_basis(code54, "optimized")
