"""Independent brute-force constructions used to pin expected values.

Everything here is built from explicit basis-index enumeration and dense
matrix products, deliberately avoiding the tensor-axis manipulations used in
the package, so the two routes only agree if both are right.
"""

import math

import numpy as np

SQRT2 = math.sqrt(2.0)


def idx3(i: int, j: int, k: int) -> int:
    """Basis index of |photon1=i, photon2=j, control=k>."""
    return (i * 2 + j) * 2 + k


def cswap_matrix() -> np.ndarray:
    """8x8 swap of the two photons conditioned on the control bit."""
    u = np.zeros((8, 8), dtype=complex)
    for i in range(2):
        for j in range(2):
            u[idx3(i, j, 0), idx3(i, j, 0)] = 1.0
            u[idx3(j, i, 1), idx3(i, j, 1)] = 1.0
    return u


def oracle_superpose(psi, phi, alpha, beta, chi):
    """Full-space evaluation of the two-state machine.

    Returns (photon-1 amplitude 2-vector, norm factor, success probability)
    with the heralded convention P = N**2 / 2, N = norm of the projected
    amplitude (control onto (|0>+|1>)/sqrt(2), photon 2 onto chi).
    """
    state = np.kron(np.kron(psi, phi), np.array([alpha, beta]))
    state = cswap_matrix() @ state
    plus_bra = np.array([1.0, 1.0]) / SQRT2
    bra = np.kron(np.kron(np.eye(2), np.conj(chi).reshape(1, 2)), plus_bra.reshape(1, 2))
    amp = (bra @ state).ravel()
    nf = float(np.linalg.norm(amp))
    return amp, nf, nf**2 / 2.0


def idx4(p1: int, pol1: int, p2: int, pol2: int) -> int:
    """Basis index of |path1, pol1, path2, pol2> (pol: 0 = H, 1 = V)."""
    return ((p1 * 2 + pol1) * 2 + p2) * 2 + pol2


def postselect_kraus_matrix() -> np.ndarray:
    """16x16 coincidence operator: keep HH (paths kept), keep VV (paths swapped)."""
    k = np.zeros((16, 16), dtype=complex)
    for p1 in range(2):
        for p2 in range(2):
            k[idx4(p1, 0, p2, 0), idx4(p1, 0, p2, 0)] = 1.0
            k[idx4(p2, 1, p1, 1), idx4(p1, 1, p2, 1)] = 1.0
    return k


def expected_postselected_state(a, b, c, d) -> np.ndarray:
    """The post-selected two-branch state written out term by term."""
    state = np.zeros(16, dtype=complex)
    amps1 = (a, b)
    amps2 = (c, d)
    for p1 in range(2):
        for p2 in range(2):
            state[idx4(p1, 0, p2, 0)] += amps1[p1] * amps2[p2] / SQRT2
            state[idx4(p1, 1, p2, 1)] += amps2[p1] * amps1[p2] / SQRT2
    return state


def hwp_matrix(angle: float) -> np.ndarray:
    two = 2.0 * angle
    return np.array(
        [[math.cos(two), math.sin(two)], [math.sin(two), -math.cos(two)]], dtype=complex
    )


def oracle_circuit(psi, phi, theta):
    """Independent dense-matrix run of the full interferometer.

    Returns (output 2-vector, success probability, stage tuple) using the
    stage convention: post-selection 1/2 charged once, erasure weight quoted
    relative to the branch pair.
    """
    a, b = psi
    c, d = phi
    plus = np.array([1.0, 1.0], dtype=complex) / SQRT2
    state = np.kron(np.kron(np.array([a, b]), plus), np.kron(np.array([c, d]), plus))
    state = postselect_kraus_matrix() @ state
    p_select = float(np.vdot(state, state).real)
    state = state / math.sqrt(p_select)

    h_bra = hwp_matrix(theta / 2.0)[0, :].reshape(1, 2)
    erase = np.kron(np.kron(np.eye(2), h_bra), np.kron(np.eye(2), h_bra))
    w = (erase @ state).ravel()
    raw = float(np.vdot(w, w).real)
    p_erase = 2.0 * raw
    w = w / math.sqrt(raw)

    project = np.kron(np.eye(2), np.array([[1.0, 0.0]], dtype=complex))
    u = (project @ w).ravel()
    wp = float(np.vdot(u, u).real)
    total = p_select * p_erase * wp
    return u / math.sqrt(wp), total, (p_select, p_erase, wp)


def chain_swap_matrix(n: int, k: int) -> np.ndarray:
    """Full-space swap of photons 1 and k conditioned on ancilla k-1.

    Factors: photons 1..n then ancillas for the (1,2)..(1,n) swaps; dimension
    2**(2n-1).
    """
    bits = 2 * n - 1
    dim = 2**bits
    ctrl = n + (k - 2)
    u = np.zeros((dim, dim), dtype=complex)
    for src in range(dim):
        digits = [(src >> (bits - 1 - pos)) & 1 for pos in range(bits)]
        if digits[ctrl] == 1:
            digits[0], digits[k - 1] = digits[k - 1], digits[0]
        dst = 0
        for dg in digits:
            dst = (dst << 1) | dg
        u[dst, src] = 1.0
    return u


def oracle_superpose_n(state_vectors, referential_vectors):
    """Brute-force n-state machine on the full 2**(2n-1) space.

    Returns (photon-1 amplitude 2-vector, norm factor, success probability)
    with norm factor scaled by (1/sqrt(2))**(n-2) and P = N**2 / 2.
    """
    n = len(state_vectors)
    plus = np.array([1.0, 1.0], dtype=complex) / SQRT2
    full = np.array([1.0], dtype=complex)
    for v in state_vectors:
        full = np.kron(full, np.asarray(v, dtype=complex))
    for _ in range(n - 1):
        full = np.kron(full, plus)
    for k in range(2, n + 1):
        full = chain_swap_matrix(n, k) @ full

    bra = np.eye(2, dtype=complex)
    for v in referential_vectors:
        bra = np.kron(bra, np.conj(np.asarray(v, dtype=complex)).reshape(1, 2))
    for _ in range(n - 1):
        bra = np.kron(bra, plus.conj().reshape(1, 2))
    amp = (bra @ full).ravel()
    phys = float(np.linalg.norm(amp))
    nf = phys / SQRT2 ** (n - 2)
    return amp, nf, nf**2 / 2.0
