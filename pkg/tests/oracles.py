"""Independent reference implementations, evaluated with mpmath at 50 digits.

These follow the textbook form of the equations directly (no
rearrangement, no log-space tricks) so that they share no code path with
the package.
"""

import mpmath as mp

mp.mp.dps = 50

PHI0, LM, W1, J0, BC = "0.95", "0.0998", "0.1261", "0.0617", "10.246"


def geometry(w, vg):
    w, av = mp.mpf(w), abs(mp.mpf(vg))
    phi0, lm, w1 = mp.mpf(PHI0), mp.mpf(LM), mp.mpf(W1)
    lam = lm / w
    w2 = w1 + w * (1 - mp.mpf("9.2") * lam / (3 * phi0 + 4 * lam - 2 * av))
    dw = w2 - w1
    phi = (phi0 - av * (w1 + w2) / (2 * w)
           - mp.mpf("1.15") * lam * w / dw * mp.log(w2 * (w - w1) / (w1 * (w - w2))))
    return lam, w2, dw, phi, mp.mpf(BC) * dw


def current(vg, w):
    vg = mp.mpf(vg)
    if vg == 0:
        return mp.mpf(0)
    av = abs(vg)
    _, _, dw, phi, b = geometry(w, vg)
    j = mp.mpf(J0) / dw**2 * (phi * mp.exp(-b * mp.sqrt(phi))
                               - (phi + av) * mp.exp(-b * mp.sqrt(phi + av)))
    return mp.sign(vg) * j


def rate_original(w, i, vg, f_off=3.5e3, f_on=2e6, i_off=115e-6, i_on=8.9e-6,
                  a_off=1.2, a_on=1.8, w_c=0.095, b=600e-6):
    """Undamped width derivative in plain float arithmetic (valid away from overflow)."""
    import math
    if vg > 0:
        return f_off * math.sinh(abs(i) / i_off) * math.exp(
            -math.exp((w - a_off) / w_c - abs(i) / b) - w / w_c)
    if vg < 0:
        return -f_on * math.sinh(abs(i) / i_on) * math.exp(
            -math.exp((a_on - w) / w_c - abs(i) / b) - w / w_c)
    return 0.0
