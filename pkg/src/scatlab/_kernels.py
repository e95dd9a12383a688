"""Compiled Numerov kernels for the radial and full-line problems."""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_BIG = 1e200


@njit(cache=True)
def frobenius_start(nu, lam, vt, r0, r1):
    """
    Regular solution u = r^(nu+1/2) sum d_m r^m and its energy derivative,
    evaluated at r0 and r1 and divided by r0^(nu+1/2).
    """
    mmax = 400
    d = np.zeros(mmax)
    e = np.zeros(mmax)
    d[0] = 1.0
    u0 = 1.0
    u1 = 1.0
    y0 = 0.0
    y1 = 0.0
    p0 = 1.0
    p1 = 1.0
    small = 0
    nv = vt.size
    for m in range(1, mmax):
        p0 *= r0
        p1 *= r1
        den = m * (m + 2.0 * nu)
        if den == 0.0:
            continue
        acc = 0.0
        acce = 0.0
        for i in range(0, min(m - 1, nv)):
            acc += vt[i] * d[m - 2 - i]
            acce += vt[i] * e[m - 2 - i]
        if m >= 2:
            acc -= lam * d[m - 2]
            acce -= lam * e[m - 2] + d[m - 2]
        d[m] = acc / den
        e[m] = acce / den
        tu0 = d[m] * p0
        tu1 = d[m] * p1
        ty0 = e[m] * p0
        ty1 = e[m] * p1
        u0 += tu0
        u1 += tu1
        y0 += ty0
        y1 += ty1
        scale = abs(u0) + abs(u1) + abs(y0) + abs(y1)
        if abs(tu0) + abs(tu1) + abs(ty0) + abs(ty1) <= 1e-18 * scale:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    f = (r1 / r0) ** (nu + 0.5)
    return u0, u1 * f, y0, y1 * f


@njit(cache=True)
def integrate_out(nu, lam, h, vl, vr, vt, j0, jm, want_y):
    """
    Numerov from node j0 to node jm + 1 on the grid r_j = j h.

    ``vl``/``vr`` hold left/right limits of V at the nodes; a jump between
    them is handled by a corrected three-term step.  The recurrence is run
    in summed-difference form (increments u_{j+1} - u_j are carried
    separately) so that rounding does not erode the slope over many steps.
    Returns (u, u', y, y', nodes) at r_jm where y = du/dlambda and ``nodes``
    counts sign changes of u on (r_j0, r_jm].
    """
    nu2q = nu * nu - 0.25
    c = h * h / 12.0
    h2 = h * h
    r0 = j0 * h
    r1 = (j0 + 1) * h
    um, uc, ym, yc = frobenius_start(nu, lam, vt, r0, r1)
    if not want_y:
        ym = 0.0
        yc = 0.0
    nodes = 0
    if um * uc < 0.0:
        nodes += 1
    # state at center j: u_j, y_j, D = wbar_j - a_-(j) u_{j-1} (same for y)
    j = j0 + 1
    cent = nu2q / (r1 * r1) - lam
    fl = cent + vl[j]
    fr = cent + vr[j]
    dv = fr - fl
    fbar = 0.5 * (fl + fr)
    fmr = nu2q / (r0 * r0) - lam + vr[j0]
    am = 1.0 - c * fmr + 0.5 * c * dv
    du_c = uc - um
    dy_c = yc - ym
    d_u = (1.0 - c * fbar) * du_c + (1.0 - c * fbar - am) * um
    d_y = (1.0 - c * fbar) * dy_c + (1.0 - c * fbar - am) * ym
    du_p = du_c
    dy_p = dy_c
    fprev = fmr
    fprev2 = fmr
    for j in range(j0 + 1, jm + 1):
        rp = (j + 1) * h
        centp = nu2q / (rp * rp) - lam
        flp = centp + vl[j + 1]
        frp = centp + vr[j + 1]
        dvp = frp - flp
        ap = 1.0 - c * flp - 0.5 * c * dv
        # -3 c^2 dv^2 comes from the O(h) correction to u' across a jump
        jmp = 3.0 * c * c * dv * dv
        d_u = d_u + h2 * fbar * uc - jmp * uc
        inc_u = (d_u + c * uc * (flp + 0.5 * dv - fbar)) / ap
        up = uc + inc_u
        if want_y:
            d_y = d_y + h2 * fbar * yc - jmp * yc - c * (up + 10.0 * uc + um)
            inc_y = (d_y + c * yc * (flp + 0.5 * dv - fbar)) / ap
            yp = yc + inc_y
        else:
            inc_y = 0.0
            yp = 0.0
        corr = 0.5 * c * (dv - dvp)
        d_u = d_u + corr * (up + uc)
        d_y = d_y + corr * (yp + yc)
        if j < jm and uc * up < 0.0:
            nodes += 1
        du_p, dy_p = du_c, dy_c
        du_c, dy_c = inc_u, inc_y
        um, uc = uc, up
        ym, yc = yc, yp
        fprev2 = fprev
        fprev = fr
        fl, fr, dv = flp, frp, dvp
        fbar = 0.5 * (fl + fr)
        if abs(uc) > _BIG:
            um /= _BIG
            uc /= _BIG
            ym /= _BIG
            yc /= _BIG
            d_u /= _BIG
            d_y /= _BIG
            du_c /= _BIG
            du_p /= _BIG
            dy_c /= _BIG
            dy_p /= _BIG
    # um = u_jm, uc = u_{jm+1}; du_c = u_{jm+1} - u_jm, du_p = u_jm - u_{jm-1}
    rm = jm * h
    fpl = nu2q / ((rm + h) * (rm + h)) - lam + vl[jm + 1]
    fmi = fprev2
    u_mm = um - du_p
    y_mm = ym - dy_p
    du = (du_c + du_p - 2.0 * c * (fpl * uc - fmi * u_mm)) / (2.0 * h)
    dy = (dy_c + dy_p - 2.0 * c * (fpl * yc - uc - fmi * y_mm + u_mm)) / (2.0 * h)
    return um, du, ym, dy, nodes


@njit(parallel=True, cache=True)
def integrate_many(nu, lams, h, vl, vr, vt, j0s, jm, want_y):
    n = lams.size
    out = np.empty((n, 5))
    for i in prange(n):
        u, du, y, dy, nodes = integrate_out(nu, lams[i], h, vl, vr, vt, j0s[i], jm, want_y)
        out[i, 0] = u
        out[i, 1] = du
        out[i, 2] = y
        out[i, 3] = dy
        out[i, 4] = nodes
    return out


@njit(cache=True)
def integrate_path(nu, lam, h, vl, vr, vt, j0, jend):
    """Full regular solution u_j for j0 <= j <= jend (zeros below j0)."""
    nu2q = nu * nu - 0.25
    c = h * h / 12.0
    u = np.zeros(jend + 1)
    r0 = j0 * h
    a, b, _, _ = frobenius_start(nu, lam, vt, r0, r0 + h)
    # restore the r0^(nu+1/2) normalisation so that u ~ r^(nu+1/2)
    norm = r0 ** (nu + 0.5)
    u[j0] = a * norm
    u[j0 + 1] = b * norm
    fm = nu2q / (r0 * r0) - lam + vr[j0]
    for j in range(j0 + 1, jend):
        r = j * h
        cent = nu2q / (r * r) - lam
        fl = cent + vl[j]
        fr = cent + vr[j]
        dv = fr - fl
        rp = r + h
        fp = nu2q / (rp * rp) - lam + vl[j + 1]
        ap = 1.0 - c * fp - 0.5 * c * dv
        ac = 1.0 + 5.0 * c * 0.5 * (fl + fr) - 1.5 * c * c * dv * dv
        am = 1.0 - c * fm + 0.5 * c * dv
        u[j + 1] = (2.0 * ac * u[j] - am * u[j - 1]) / ap
        fm = fr
    return u


@njit(cache=True)
def line_sweep(k, h, vl, vr, x0, npts):
    """
    Complex Numerov across the line grid x_j = x0 + j h, j = 0..npts-1,
    started from the discrete plane wave exp(i kt x) at the right end.

    Runs in summed-difference form like ``integrate_out``; at low k the
    solution is nearly linear and the plain recurrence loses the slope to
    rounding.  Returns the coefficients (A, B) of exp(i kt x) and
    exp(-i kt x) on the left end, with kt the Numerov wavenumber.
    """
    c = h * h / 12.0
    lam = k * k
    # cos theta = (1 - 5 c lam)/(1 + c lam); the half-angle form keeps theta accurate at small k h
    theta = 2.0 * np.arcsin(np.sqrt(3.0 * c * lam / (1.0 + c * lam)))
    kt = theta / h
    # e^{i theta} - 1 without cancellation
    em1 = 2j * np.sin(0.5 * theta) * np.exp(0.5j * theta)
    jr = npts - 1
    xr = x0 + jr * h
    up = np.exp(1j * kt * xr)
    # d = u_j - u_{j+1}, starting at j = jr - 1
    d = up * np.conj(em1)
    uc = up + d
    fp = vl[jr] - lam
    for j in range(jr - 1, 0, -1):
        fl = vl[j] - lam
        fr = vr[j] - lam
        dv = fr - fl
        fm = vr[j - 1] - lam
        am = 1.0 - c * fm + 0.5 * c * dv
        # 2 a_c - a_+ - a_- and a_+ - a_- in closed form
        s2 = c * (5.0 * (fl + fr) + fp + fm) - 3.0 * c * c * dv * dv
        sd = -c * (fp - fm) - c * dv
        d = d + (sd * d + s2 * uc) / am
        uc = uc + d
        fp = fl
    # uc = u_0, -d = u_1 - u_0
    ea = np.exp(1j * kt * x0)
    den = -2j * np.sin(theta)
    amp_a = (uc * np.conj(em1) + d) / (ea * den)
    amp_b = ea * (-d - uc * em1) / den
    return amp_a, amp_b


@njit(parallel=True, cache=True)
def line_many(ks, h, vl, vr, x0, npts):
    n = ks.size
    out = np.empty((n, 2), dtype=np.complex128)
    for i in prange(n):
        a, b = line_sweep(ks[i], h, vl, vr, x0, npts)
        out[i, 0] = a
        out[i, 1] = b
    return out
