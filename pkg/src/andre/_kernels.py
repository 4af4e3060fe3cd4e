"""Fused full-batch Adam training loop, compiled with numba.

Mirrors ``scnf.cost_and_gradient`` + ``optimizer.adam_step`` exactly in
formulation; only summation order differs. The residual kernel of the
problem is passed in as a jitted function.
"""
import math

import numba
import numpy as np


@numba.njit(cache=True)
def _sig(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@numba.njit(cache=True)
def train_loop(W, t_all, P_all, dP_all, offset, u0, penalty, prefixes, epochs, terms, c,
               alpha, beta1, beta2, eps, stop_below, trace):
    """Train ``W`` (o, m, 3H+1) in place.

    ``prefixes[j]`` points are used for ``epochs[j]`` epochs; Adam moments
    restart with every increment. ``trace`` receives the cost before each
    update. Returns ``(epochs_run, diverged_at)`` with ``diverged_at = -1``
    when every cost and gradient stayed finite.
    """
    o, m, L = W.shape
    H = (L - 1) // 3
    n_all = t_all.shape[0]
    s = np.empty((o, m, H, n_all))
    s1 = np.empty((o, m, H, n_all))
    s2 = np.empty((o, m, H, n_all))
    N = np.empty((o, m, n_all))
    g = np.empty((o, m, L))
    mom1 = np.empty((o, m, L))
    mom2 = np.empty((o, m, L))
    ic = np.empty(o)
    done = 0
    for inc in range(prefixes.shape[0]):
        n = prefixes[inc]
        t = t_all[:n]
        mom1[:] = 0.0
        mom2[:] = 0.0
        last = inc == prefixes.shape[0] - 1
        for step in range(1, epochs[inc] + 1):
            u = np.empty((o, n))
            ud = np.empty((o, n))
            for q in range(o):
                for i in range(n):
                    u[q, i] = offset[q]
                    ud[q, i] = 0.0
                for k in range(m):
                    for i in range(n):
                        acc = W[q, k, 3 * H]
                        accd = 0.0
                        ti = t[i]
                        for j in range(H):
                            nu = W[q, k, j]
                            rho = W[q, k, 2 * H + j]
                            sv = _sig(nu * ti + W[q, k, H + j])
                            sd = sv * (1.0 - sv)
                            s[q, k, j, i] = sv
                            s1[q, k, j, i] = sd
                            s2[q, k, j, i] = sd * (1.0 - 2.0 * sv)
                            acc += rho * sv
                            accd += rho * nu * sd
                        N[q, k, i] = acc
                        u[q, i] += acc * P_all[k, i]
                        ud[q, i] += accd * P_all[k, i] + acc * dP_all[k, i]
            G, Gu, Gv = terms(t, u, ud, c)

            value = 0.0
            for q in range(o):
                for i in range(n):
                    value += G[q, i] * G[q, i]
            value /= 2.0 * n
            if penalty:
                for q in range(o):
                    ic[q] = N[q, 0, 0] - u0[q]
                    value += 0.5 * ic[q] * ic[q]
            trace[done] = value
            if not math.isfinite(value):
                return done, done

            g[:] = 0.0
            for r in range(o):
                for i in range(n):
                    a = 0.0
                    b = 0.0
                    for q in range(o):
                        a += G[q, i] * Gu[q, r, i]
                        b += G[q, i] * Gv[q, r, i]
                    a /= n
                    b /= n
                    ti = t[i]
                    for k in range(m):
                        cN = a * P_all[k, i] + b * dP_all[k, i]
                        cD = b * P_all[k, i]
                        g[r, k, 3 * H] += cN
                        for j in range(H):
                            nu = W[r, k, j]
                            rho = W[r, k, 2 * H + j]
                            dN_eta = rho * s1[r, k, j, i]
                            dD_eta = rho * s2[r, k, j, i] * nu
                            g[r, k, j] += cN * dN_eta * ti + cD * (dD_eta * ti + rho * s1[r, k, j, i])
                            g[r, k, H + j] += cN * dN_eta + cD * dD_eta
                            g[r, k, 2 * H + j] += cN * s[r, k, j, i] + cD * s1[r, k, j, i] * nu
            if penalty:
                # t_all[0] is the anchor t0; its activations are column 0
                for q in range(o):
                    g[q, 0, 3 * H] += ic[q]
                    for j in range(H):
                        rho = W[q, 0, 2 * H + j]
                        dN_eta = rho * s1[q, 0, j, 0]
                        g[q, 0, j] += ic[q] * dN_eta * t_all[0]
                        g[q, 0, H + j] += ic[q] * dN_eta
                        g[q, 0, 2 * H + j] += ic[q] * s[q, 0, j, 0]

            c1 = 1.0 - beta1 ** step
            c2 = 1.0 - beta2 ** step
            for q in range(o):
                for k in range(m):
                    for x in range(L):
                        gx = g[q, k, x]
                        if not math.isfinite(gx):
                            return done, done
                        mom1[q, k, x] = beta1 * mom1[q, k, x] + (1.0 - beta1) * gx
                        mom2[q, k, x] = beta2 * mom2[q, k, x] + (1.0 - beta2) * gx * gx
            for q in range(o):
                for k in range(m):
                    for x in range(L):
                        mh = mom1[q, k, x] / c1
                        vh = mom2[q, k, x] / c2
                        W[q, k, x] -= alpha * mh / (math.sqrt(vh) + eps)
            done += 1
            if last and stop_below > 0.0 and value < stop_below:
                return done, -1
    return done, -1
