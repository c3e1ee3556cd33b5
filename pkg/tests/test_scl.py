import numpy as np
import pytest

from nbpolar.channel import ChannelParams, bits_to_symbol_pmf, demap_bits, modulate, transmit
from nbpolar.code import CodeSpec, Kernel, conventional_scl_node_count, encode, insert_payload
from nbpolar.decoders import ml_decode, path_transition_probs, sc_decode_batch, scl_decode, scl_decode_batch
from nbpolar.galois import GaloisField
from nbpolar.pmf import apply_perm, cn_update, vn_update


def make_spec(q, n_c, alpha, beta=1, t=None):
    f = GaloisField(q)
    t = np.zeros(n_c, dtype=np.int64) if t is None else np.asarray(t, dtype=np.int64)
    return CodeSpec(f, n_c, Kernel(alpha, beta), t)


def noisy_frames(spec, n, snr_db, seed):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(n, spec.k_bin))
    u = insert_payload(spec, bits)
    params = ChannelParams(esn0_db=snr_db)
    y = transmit(modulate(spec.field, encode(spec, u)), params, rng)
    return u, bits_to_symbol_pmf(demap_bits(y, params), spec.field)


# ---------------------------------------------------------------------------
# a deliberately naive reference: full recomputation, full copies
# ---------------------------------------------------------------------------

def _sub_encode(f, kr, u):
    if len(u) == 1:
        return list(u)
    half = len(u) // 2
    a = _sub_encode(f, kr, u[:half])
    b = _sub_encode(f, kr, u[half:])
    return [x ^ f.mul_table[kr.alpha, y] for x, y in zip(a, b)] + [
        int(f.mul_table[kr.beta, y]) for y in b
    ]


def _cond_pmf(spec, pmfs, decisions):
    """Conditional pmf of the next phase given a decision prefix."""
    f, kr = spec.field, spec.kernel
    ratio = f.mul(kr.alpha, f.inv(kr.beta))

    def rec(ps, dec):
        if len(ps) == 1:
            return ps[0]
        half = len(ps) // 2
        if len(dec) < half:
            upper = [cn_update(ps[j], apply_perm(ps[half + j], f.mul_perm(ratio))) for j in range(half)]
            return rec(upper, dec)
        v0 = _sub_encode(f, kr, dec[:half])
        lower = []
        for j in range(half):
            shifted = apply_perm(ps[j], f.add_perm(int(v0[j])))
            lower.append(
                vn_update(
                    apply_perm(shifted, f.mul_perm(f.inv(kr.alpha))),
                    apply_perm(ps[half + j], f.mul_perm(f.inv(kr.beta))),
                )
            )
        return rec(lower, dec[half:])

    return rec(list(pmfs), list(decisions))


def naive_scl(spec, ch_pmfs, list_size, delta1=0.0, delta2=0.0):
    """Reference list decoder: recompute everything per phase, copy freely."""
    paths = [((), 1.0)]
    n_node = 0
    for phase in range(spec.n_c):
        s = int(spec.s_sizes[phase])
        children = []
        for rank, (prefix, pm) in enumerate(paths):
            leaf = _cond_pmf(spec, ch_pmfs, prefix)
            for sym in range(s):
                children.append((prefix + (sym,), pm * leaf[sym], rank, sym))
        children.sort(key=lambda c: (-c[1], c[2], c[3]))
        survivors = children[: min(list_size, len(children))]
        pms = [c[1] for c in survivors]
        kept = []
        for l, c in enumerate(survivors):
            if l > 0 and (pms[l] < delta1 * pms[0] or pms[l] < delta2 * pms[l - 1]):
                continue
            kept.append(c)
        n_node += len(kept)
        best = kept[0][1]
        paths = [(c[0], c[1] / best) for c in kept]
    return paths, n_node


@pytest.mark.parametrize(
    "q,n_c,alpha,beta,t,L,d1,d2",
    [
        (4, 4, 2, 1, None, 4, 0.0, 0.0),
        (4, 8, 2, 3, [2, 2, 1, 0, 0, 0, 0, 0], 4, 0.0, 0.0),
        (8, 4, 3, 1, [3, 1, 0, 0], 6, 0.0, 0.0),
        (4, 8, 2, 1, [2, 2, 0, 0, 0, 0, 0, 0], 4, 0.05, 0.2),
        (8, 4, 3, 5, None, 8, 0.01, 0.1),
    ],
)
def test_engine_matches_naive_reference(q, n_c, alpha, beta, t, L, d1, d2):
    spec = make_spec(q, n_c, alpha, beta, t)
    u, pmfs = noisy_frames(spec, 12, 3.0, seed=q * n_c + L)
    for b in range(12):
        want_paths, want_nodes = naive_scl(spec, pmfs[b], L, d1, d2)
        res = scl_decode(spec, pmfs[b], L, d1, d2)
        assert res.n_node == want_nodes
        got = [tuple(c) for c in res.candidates]
        assert got == [p[0] for p in want_paths]
        assert np.allclose(res.pms, [p[1] for p in want_paths], rtol=1e-9)


def test_list_one_equals_sc_exactly():
    spec = make_spec(16, 16, 6, t=[4] * 5 + [0] * 11)
    u, pmfs = noisy_frames(spec, 300, 3.0, seed=1)
    sc_hat, _ = sc_decode_batch(spec, pmfs)
    cands, _, alive, n_node, _ = scl_decode_batch(spec, pmfs, 1)
    assert (cands[:, 0] == sc_hat).all()
    assert (n_node == spec.n_c).all()


def test_full_pruning_equals_sc():
    spec = make_spec(16, 16, 6, t=[4] * 5 + [0] * 11)
    u, pmfs = noisy_frames(spec, 300, 3.0, seed=2)
    sc_hat, _ = sc_decode_batch(spec, pmfs)
    cands, pms, alive, n_node, _ = scl_decode_batch(spec, pmfs, 8, 1.0, 1.0)
    assert (cands[:, 0] == sc_hat).all()
    assert (n_node == spec.n_c).all(), "delta = 1 keeps a single path per phase"


def test_threshold_validation():
    spec = make_spec(4, 4, 2)
    _, pmfs = noisy_frames(spec, 1, 3.0, seed=3)
    with pytest.raises(ValueError):
        scl_decode_batch(spec, pmfs, 0)
    with pytest.raises(ValueError):
        scl_decode_batch(spec, pmfs, 4, 0.5, 0.1)
    with pytest.raises(ValueError):
        scl_decode_batch(spec, pmfs, 4, -0.1, 0.1)


def test_exhaustive_list_matches_ml():
    spec = make_spec(4, 4, 2)
    u, pmfs = noisy_frames(spec, 100, 2.0, seed=4)
    agree = 0
    for b in range(100):
        cands, _, _, _, _ = scl_decode_batch(spec, pmfs[b : b + 1], 256)
        ml = ml_decode(spec, pmfs[b])
        agree += int((cands[0, 0] == ml.u_hat).all())
    assert agree >= 99


def test_n_node_channel_independent_for_conventional():
    spec = make_spec(16, 16, 6, t=[4] * 6 + [0] * 10)
    want = conventional_scl_node_count(spec, 4)
    for snr in (0.0, 3.0, 9.0):
        _, pmfs = noisy_frames(spec, 40, snr, seed=5)
        _, _, alive, n_node, _ = scl_decode_batch(spec, pmfs, 4)
        assert (n_node == want).all()
        assert alive[:, 0].all(), "the best path always survives"


def test_pruned_node_count_shrinks_with_snr():
    spec = make_spec(16, 16, 6, t=[4] * 6 + [0] * 10)
    counts = []
    for snr in (0.0, 6.0):
        _, pmfs = noisy_frames(spec, 60, snr, seed=6)
        _, _, _, n_node, _ = scl_decode_batch(spec, pmfs, 8, 1e-6, 1e-5)
        counts.append(n_node.mean())
    conventional = conventional_scl_node_count(spec, 8)
    assert counts[0] <= conventional
    assert counts[1] < counts[0], "pruning adapts the complexity to the channel"


def test_pm_telescoping():
    spec = make_spec(16, 16, 6, t=[4] * 5 + [0] * 11)
    _, pmfs = noisy_frames(spec, 30, 2.0, seed=7)
    cands, pms, alive, _, scale_log = scl_decode_batch(spec, pmfs, 4)
    for b in range(30):
        for l in range(cands.shape[1]):
            if not alive[b, l] or pms[b, l] <= 0:
                continue
            trans = path_transition_probs(spec, pmfs[b], cands[b, l])
            want_log = np.log(trans).sum()
            got_log = np.log(pms[b, l]) + scale_log[b]
            assert got_log == pytest.approx(want_log, rel=1e-9, abs=1e-9)
