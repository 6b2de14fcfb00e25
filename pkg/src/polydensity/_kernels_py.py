"""Pure numpy implementations of the product kernels (fallback path)."""
import numpy as np

_CHUNK = 1 << 20


def _rows_per_chunk(K):
    return max(1, _CHUNK // max(K, 1))


def prod_log_real(x, inv, mult, skip):
    x = np.asarray(x, dtype=np.float64)
    inv = np.asarray(inv, dtype=np.float64)
    mult = np.asarray(mult, dtype=np.float64)
    skip = np.asarray(skip, dtype=np.int64)
    n, K = x.shape[0], inv.shape[0]
    out_log = np.empty(n)
    out_sign = np.empty(n)
    step = _rows_per_chunk(K)
    for s in range(0, n, step):
        xs = x[s:s + step]
        t = 1.0 - xs[:, None] * inv[None, :]
        rows = np.arange(xs.shape[0])
        sk = skip[s:s + step]
        has = sk >= 0
        t[rows[has], sk[has]] = 1.0
        zero = np.any(t == 0.0, axis=1)
        with np.errstate(divide="ignore"):
            lg = np.sum(mult[None, :] * np.log(np.abs(t)), axis=1)
        neg = np.sum((t < 0) * mult[None, :], axis=1) % 2
        sg = np.where(neg == 1, -1.0, 1.0)
        lg[zero] = -np.inf
        sg[zero] = 0.0
        out_log[s:s + step] = lg
        out_sign[s:s + step] = sg
    return out_log, out_sign


def prod_log_complex(zr, zi, inv, mult):
    z = np.asarray(zr, dtype=np.float64) + 1j * np.asarray(zi, dtype=np.float64)
    inv = np.asarray(inv, dtype=np.float64)
    mult = np.asarray(mult, dtype=np.float64)
    n, K = z.shape[0], inv.shape[0]
    out_log = np.empty(n)
    out_arg = np.empty(n)
    step = _rows_per_chunk(K)
    for s in range(0, n, step):
        t = 1.0 - z[s:s + step, None] * inv[None, :]
        with np.errstate(divide="ignore"):
            lt = np.log(t)
        lg = np.sum(mult[None, :] * lt.real, axis=1)
        ag = np.angle(np.exp(1j * np.sum(mult[None, :] * lt.imag, axis=1)))
        zero = np.any(t == 0.0, axis=1)
        lg[zero] = -np.inf
        ag[zero] = 0.0
        out_log[s:s + step] = lg
        out_arg[s:s + step] = ag
    return out_log, out_arg
