import numpy as np
import pytest

from nbpolar.channel import ChannelParams, bits_to_symbol_pmf, demap_bits, modulate, transmit
from nbpolar.code import CodeSpec, Kernel, encode, extract_payload, insert_payload
from nbpolar.decoders import (
    CRC16,
    crc_attach,
    crc_check,
    genie_error_matrix,
    path_transition_probs,
    sc_decode,
    sc_decode_batch,
    scf_decode_batch,
    sco1_decode,
    sco1_decode_batch,
)
from nbpolar.decoders.sc import _flip_candidates
from nbpolar.galois import GaloisField
from nbpolar.pmf import apply_perm, cn_update, vn_update

NOISELESS = ChannelParams(esn0_db=float("inf"))


def make_spec(q=16, n_c=16, alpha=6, beta=1, frozen=6, partial=0, crc_len=0):
    f = GaloisField(q)
    t = np.zeros(n_c, dtype=np.int64)
    t[:frozen] = f.r
    if partial:
        t[frozen] = partial
    return CodeSpec(f, n_c, Kernel(alpha, beta), t, crc_len)


def frames_for(spec, n, snr_db, seed, crc=None):
    rng = np.random.default_rng(seed)
    msgs = rng.integers(0, 2, size=(n, spec.k))
    payload = crc_attach(msgs, crc) if crc else msgs
    u = insert_payload(spec, payload)
    params = ChannelParams(esn0_db=snr_db)
    y = transmit(modulate(spec.field, encode(spec, u)), params, rng)
    pmfs = bits_to_symbol_pmf(demap_bits(y, params), spec.field)
    return msgs, u, pmfs


def test_sc_noiseless_recovery():
    for spec in (make_spec(), make_spec(q=4, n_c=8, alpha=2, frozen=3, partial=1), make_spec(q=256, n_c=4, alpha=29, frozen=1)):
        _, u, pmfs = frames_for(spec, 6, float("inf"), seed=1)
        u_hat, _ = sc_decode_batch(spec, pmfs)
        assert (u_hat == u).all()


def test_sc_single_butterfly_matches_pmf_primitives():
    f = GaloisField(4)
    spec = CodeSpec(f, 2, Kernel(alpha=2, beta=3), np.zeros(2, dtype=np.int64))
    rng = np.random.default_rng(0)
    p = rng.random((2, 4))
    p /= p.sum(-1, keepdims=True)
    res = sc_decode(spec, p, return_phase_pmfs=True)

    ratio = f.mul(2, f.inv(3))
    upper = cn_update(p[0], apply_perm(p[1], f.mul_perm(ratio)))
    assert np.allclose(res.phase_pmfs[0], upper, atol=1e-12)
    u1 = int(upper.argmax())
    assert res.u_hat[0] == u1
    shifted = apply_perm(p[0], f.add_perm(u1))
    lower = vn_update(
        apply_perm(shifted, f.mul_perm(f.inv(2))),
        apply_perm(p[1], f.mul_perm(f.inv(3))),
    )
    assert np.allclose(res.phase_pmfs[1], lower, atol=1e-12)
    assert res.u_hat[1] == int(lower.argmax())


def test_sc_decisions_respect_frozen_sets():
    spec = make_spec(q=8, n_c=8, alpha=3, frozen=2, partial=2)
    _, _, pmfs = frames_for(spec, 50, 0.0, seed=3)
    u_hat, _ = sc_decode_batch(spec, pmfs)
    assert (u_hat < spec.s_sizes).all()


def test_path_transition_probs_product_is_path_posterior():
    spec = make_spec(q=4, n_c=4, alpha=2, frozen=0)
    _, u, pmfs = frames_for(spec, 1, 3.0, seed=4)
    u_hat, _ = sc_decode_batch(spec, pmfs)
    trans = path_transition_probs(spec, pmfs[0], u_hat[0])
    assert trans.shape == (4,)
    assert ((trans > 0) & (trans <= 1)).all()
    # forcing the SC trajectory reproduces the SC decisions' probabilities
    rec = sc_decode(spec, pmfs[0], return_phase_pmfs=True)
    want = rec.phase_pmfs[np.arange(4), u_hat[0]]
    assert np.allclose(trans, want, rtol=1e-12)


def test_genie_error_matrix_noiseless_is_clean():
    spec = make_spec()
    _, u, pmfs = frames_for(spec, 4, float("inf"), seed=5)
    assert genie_error_matrix(spec, pmfs, u).sum() == 0


def test_sco1_noiseless_and_single_error_frames():
    spec = make_spec(q=16, n_c=16, alpha=6, frozen=6)
    _, u, pmfs = frames_for(spec, 4, float("inf"), seed=6)
    res = sco1_decode(spec, pmfs[0], u[0])
    assert res.error_count == 0
    assert (res.u_hat == u[0]).all()

    # noisy frames: every frame with exactly one channel-caused error is
    # recovered; the plain-SC failure set is a superset of sco1's
    _, u, pmfs = frames_for(spec, 400, 4.0, seed=7)
    counts = genie_error_matrix(spec, pmfs, u).sum(axis=1)
    u_hat, counts2 = sco1_decode_batch(spec, pmfs, u)
    assert (counts == counts2).all()
    one = counts == 1
    assert (u_hat[one] == u[one]).all()
    sc_hat, _ = sc_decode_batch(spec, pmfs)
    sc_err = (sc_hat != u).any(axis=1)
    sco1_err = (u_hat != u).any(axis=1)
    assert (sco1_err & ~sc_err).sum() == 0
    assert sc_err.sum() >= sco1_err.sum()


def test_flip_candidate_matrix_invariants():
    spec = make_spec(q=8, n_c=8, alpha=3, frozen=3, partial=1, crc_len=0)
    _, _, pmfs = frames_for(spec, 10, 2.0, seed=8)
    u_hat, phase_pmfs = sc_decode_batch(spec, pmfs, record_pmfs=True)
    lam = _flip_candidates(spec, phase_pmfs, u_hat)
    assert (lam <= 1.0 + 1e-12).all()
    assert (lam >= 0.0).all()
    taken = np.take_along_axis(lam, u_hat[:, :, None], axis=-1)
    assert (taken == 0).all(), "the decided symbol is excluded"
    outside = spec.s_sizes[:, None] <= np.arange(spec.field.q)[None, :]
    assert (lam[:, outside] == 0).all(), "zero outside S(u_i)"
    frozen_rows = spec.s_sizes == 1
    assert (lam[:, frozen_rows, :] == 0).all()
    info_rows = spec.s_sizes > 1
    assert (lam[:, info_rows, :].reshape(10, -1) > 0).any(axis=1).all()


def scf_spec():
    return make_spec(q=16, n_c=16, alpha=6, frozen=5, crc_len=16)


def test_scf_noiseless_zero_attempts():
    spec = scf_spec()
    _, u, pmfs = frames_for(spec, 4, float("inf"), seed=9, crc=CRC16)
    u_hat, ok, attempts = scf_decode_batch(spec, pmfs, t_max=8, crc_cfg=CRC16)
    assert (u_hat == u).all()
    assert ok.all()
    assert (attempts == 0).all()


def test_scf_tmax_zero_equals_crc_checked_sc():
    spec = scf_spec()
    _, u, pmfs = frames_for(spec, 300, 2.0, seed=10, crc=CRC16)
    u_scf, ok, attempts = scf_decode_batch(spec, pmfs, t_max=0, crc_cfg=CRC16)
    u_sc, _ = sc_decode_batch(spec, pmfs)
    assert (u_scf == u_sc).all()
    assert (attempts == 0).all()
    assert (ok == crc_check(extract_payload(spec, u_sc), CRC16)).all()


def test_scf_improves_on_sc_and_counts_attempts():
    spec = scf_spec()
    msgs, u, pmfs = frames_for(spec, 400, 3.0, seed=11, crc=CRC16)
    u_scf, ok, attempts = scf_decode_batch(spec, pmfs, t_max=12, crc_cfg=CRC16)
    u_sc, _ = sc_decode_batch(spec, pmfs)
    sc_err = (u_sc != u).any(axis=1)
    scf_err = (u_scf != u).any(axis=1)
    assert (scf_err & ~sc_err).sum() == 0, "flip decoding never breaks an SC success"
    assert scf_err.sum() < sc_err.sum(), "and fixes at least one frame at this SNR"
    assert (attempts[sc_err & ~scf_err] >= 1).all()
    needs_crc = make_spec(q=16, n_c=16, alpha=6, frozen=5, crc_len=0)
    with pytest.raises(ValueError):
        scf_decode_batch(needs_crc, pmfs, t_max=3, crc_cfg=CRC16)


def test_sc_rejects_bad_shapes():
    spec = make_spec()
    with pytest.raises(ValueError):
        sc_decode_batch(spec, np.ones((4, 15, 16)) / 16)
    with pytest.raises(ValueError):
        sc_decode_batch(spec, np.ones((4, 16, 8)) / 8)
