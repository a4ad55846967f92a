"""Polar code construction and GF(2) encoding.

A code PC(N, K) is fixed by its block length N = 2^n, dimension K, and the
set of frozen input positions. Frozen positions are chosen by ranking the
synthetic channels with the Bhattacharyya-parameter recursion evaluated at a
design SNR. All index conventions are natural order, 0-based; no bit-reversal
permutation is applied anywhere.
"""

import math

import numpy as np


def generator_matrix(n):
    """Return the N x N binary generator matrix for block length N = 2^n.

    Entry (i, j) is 1 iff the bit pattern of j is contained in i, i.e.
    (i AND j) == j. This is the n-fold Kronecker power of [[1,0],[1,1]].

    Parameters
    ----------
    n : int
        Log2 of the block length, 0 <= n <= 16.

    Returns
    -------
    numpy.ndarray
        (2^n, 2^n) array of uint8 in {0, 1}.
    """
    if not 0 <= n <= 16:
        raise ValueError(f"n must be in [0, 16], got {n}")
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] & idx[None, :]) == idx[None, :]).astype(np.uint8)


def polar_transform(bits):
    """Apply the polar transform x = u * G mod 2 in place-order O(N log N).

    The transform is an involution: applying it twice returns the input.
    """
    x = np.asarray(bits, dtype=np.uint8).copy()
    N = x.size
    if N == 0 or N & (N - 1):
        raise ValueError(f"length must be a power of 2, got {N}")
    step = 2
    while step <= N:
        blocks = x.reshape(-1, step)
        blocks[:, : step // 2] ^= blocks[:, step // 2 :]
        step *= 2
    return x


class CodeSpec:
    """Identity of a polar code: (N, K, frozen set, design SNR).

    Parameters
    ----------
    N : int
        Block length, a power of two.
    K : int
        Number of information bits, 1 <= K <= N.
    frozen_set : array_like of int
        The N-K frozen input positions.
    design_snr_db : float
        Design SNR in dB used (or assumed) for the construction.
    """

    def __init__(self, N, K, frozen_set, design_snr_db=1.0):
        if N <= 0 or N & (N - 1):
            raise ValueError(f"N must be a power of 2, got {N}")
        if not 1 <= K <= N:
            raise ValueError(f"K must satisfy 1 <= K <= N, got K={K}, N={N}")
        frozen = np.asarray(sorted(int(i) for i in frozen_set), dtype=np.int64)
        if frozen.size != N - K:
            raise ValueError(
                f"frozen set size {frozen.size} does not match N-K={N - K}"
            )
        if frozen.size:
            if frozen[0] < 0 or frozen[-1] >= N:
                raise ValueError("frozen indices out of range")
            if np.unique(frozen).size != frozen.size:
                raise ValueError("frozen set contains duplicates")
        self.N = int(N)
        self.K = int(K)
        self.n = int(N).bit_length() - 1
        self.design_snr_db = float(design_snr_db)
        self.frozen_set = frozen
        mask = np.ones(N, dtype=bool)
        mask[frozen] = False
        self.info_set = np.flatnonzero(mask).astype(np.int64)
        self.frozen_mask = ~mask
        for arr in (self.frozen_set, self.info_set, self.frozen_mask):
            arr.setflags(write=False)

    @property
    def rate(self):
        return self.K / self.N

    def __eq__(self, other):
        if not isinstance(other, CodeSpec):
            return NotImplemented
        return (
            self.N == other.N
            and self.K == other.K
            and np.array_equal(self.frozen_set, other.frozen_set)
        )

    def __repr__(self):
        return f"CodeSpec(N={self.N}, K={self.K}, designSNR={self.design_snr_db})"

    def to_text(self):
        """Serialize as `N=<int> K=<int> designSNR=<real> frozen=<i,j,...>`."""
        frozen = ",".join(str(i) for i in self.frozen_set)
        return f"N={self.N} K={self.K} designSNR={self.design_snr_db} frozen={frozen}"

    @classmethod
    def from_text(cls, text):
        """Parse the single-line text format produced by `to_text`."""
        fields = {}
        for token in text.split():
            if "=" not in token:
                raise ValueError(f"malformed code spec token: {token!r}")
            key, _, value = token.partition("=")
            fields[key] = value
        try:
            N = int(fields["N"])
            K = int(fields["K"])
            snr = float(fields["designSNR"])
            raw = fields["frozen"]
        except KeyError as exc:
            raise ValueError(f"code spec missing field {exc.args[0]}") from None
        frozen = [int(tok) for tok in raw.split(",") if tok != ""]
        return cls(N, K, frozen, snr)


def construct_frozen_set(N, K, design_snr_db):
    """Build a CodeSpec by Bhattacharyya-parameter channel ranking.

    The recursion Z(W-) = 2Z - Z^2, Z(W+) = Z^2 starts from
    Z0 = exp(-10^(design_snr_db/10)) and runs in the log domain for
    stability. The K most reliable positions (smallest Z) become the
    information set; ties freeze the smaller index first.
    """
    if N <= 0 or N & (N - 1):
        raise ValueError(f"N must be a power of 2, got {N}")
    if not 1 <= K <= N:
        raise ValueError(f"K must satisfy 1 <= K <= N, got K={K}, N={N}")
    n = N.bit_length() - 1
    # ln Z, starting from ln Z0 = -10^(dSNR/10)
    lz = np.array([-(10.0 ** (design_snr_db / 10.0))])
    log2 = math.log(2.0)
    for _ in range(n):
        # ln(2Z - Z^2) = ln Z + ln 2 + log1p(-Z/2); exp(lz) <= 1 so safe
        minus = lz + log2 + np.log1p(-0.5 * np.exp(lz))
        out = np.empty(2 * lz.size)
        out[0::2] = np.minimum(minus, 0.0)
        out[1::2] = 2.0 * lz
        lz = out
    # descending Z; stable sort keeps smaller indices first among ties
    order = np.argsort(-lz, kind="stable")
    frozen = np.sort(order[: N - K])
    return CodeSpec(N, K, frozen, design_snr_db)


def encode(data, spec):
    """Non-systematic encoding: place data on the information positions of u
    (frozen positions are 0) and return x = u * G mod 2.
    """
    data = np.asarray(data, dtype=np.uint8)
    if data.size != spec.K:
        raise ValueError(f"data length {data.size} does not match K={spec.K}")
    u = np.zeros(spec.N, dtype=np.uint8)
    u[spec.info_set] = data
    return polar_transform(u)


def encode_systematic(data, spec):
    """Systematic encoding: the returned codeword carries the data verbatim
    on the information positions, with the frozen u-domain inputs still 0.

    Solves data = u_A * G[A, A] by triangular substitution. With A sorted
    ascending, G[A_s, A_t] is nonzero only for A_t bitwise-contained in A_s,
    so the system is triangular with unit diagonal and the solution (hence
    the codeword with x[A] = data, u on the frozen set = 0) is unique.
    """
    data = np.asarray(data, dtype=np.uint8)
    if data.size != spec.K:
        raise ValueError(f"data length {data.size} does not match K={spec.K}")
    A = spec.info_set
    K = spec.K
    u_a = np.zeros(K, dtype=np.uint8)
    for t in range(K - 1, -1, -1):
        acc = int(data[t])
        if t < K - 1:
            covers = (A[t + 1 :] & A[t]) == A[t]
            acc ^= int(u_a[t + 1 :][covers].sum()) & 1
        u_a[t] = acc
    u = np.zeros(spec.N, dtype=np.uint8)
    u[A] = u_a
    return polar_transform(u)
