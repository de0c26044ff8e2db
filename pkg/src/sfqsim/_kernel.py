"""Inner time-stepping loop of the transient solver.

The linear part of the MNA matrix is constant over a run (fixed dt), so it is
factored once outside; each Newton iteration then costs one dense matvec with
the precomputed inverse plus a small junction-rank correction via the
Sherman-Morrison-Woodbury identity:

    (G + U D U^T)^-1 F = y - W (I + D S0)^-1 D U^T y,   y = G^-1 F

with W = G^-1 U and S0 = U^T W precomputed, D = diag(Ic_j alpha cos(phi_j)).
Residuals are always evaluated against the exact G, so the inexactness of the
stored inverse only affects the iteration path, not the accepted solution.

Compiled with numba when available; the same function runs un-jitted
otherwise (slower, same arithmetic).
"""

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def run_chunk(
    G, Ginv, W, S0,
    jj_a, jj_b, jj_ic, jj_geqc, alpha, ic_max,
    cap_a, cap_b, cap_geq,
    ind_row, ind_a, ind_b, Md,
    vs_row, vs_vals,
    cs_a, cs_b, cs_vals,
    nz_a, nz_b, nz_vals,
    pr_kind, pr_i1, pr_a, pr_b, pr_g,
    tol, max_iter, n_nodes,
    x, jj_phi, jj_v, jj_icap, cap_v, cap_i, ind_i, ind_v,
    out, step_offset,
):
    steps = out.shape[1]
    n = G.shape[0]
    m = jj_a.shape[0]
    n_cap = cap_a.shape[0]
    n_ind = ind_row.shape[0]
    b = np.empty(n)
    phi_new = np.empty(m)
    isin = np.empty(m)
    rhs = np.empty(m)
    A = np.empty((m, m))

    for s in range(steps):
        # --- assemble the step's right-hand side -------------------------
        for i in range(n):
            b[i] = 0.0
        for j in range(m):
            ieq = jj_geqc[j] * jj_v[j] + jj_icap[j]
            if jj_a[j] >= 0:
                b[jj_a[j]] += ieq
            if jj_b[j] >= 0:
                b[jj_b[j]] -= ieq
        for j in range(n_cap):
            ieq = cap_geq[j] * cap_v[j] + cap_i[j]
            if cap_a[j] >= 0:
                b[cap_a[j]] += ieq
            if cap_b[j] >= 0:
                b[cap_b[j]] -= ieq
        for j in range(n_ind):
            veq = ind_v[j]
            for k in range(n_ind):
                veq += Md[j, k] * ind_i[k]
            b[ind_row[j]] -= veq
        for j in range(vs_row.shape[0]):
            b[vs_row[j]] += vs_vals[s, j]
        for j in range(cs_a.shape[0]):
            cur = cs_vals[s, j]
            if cs_a[j] >= 0:
                b[cs_a[j]] += cur
            if cs_b[j] >= 0:
                b[cs_b[j]] -= cur
        for j in range(nz_a.shape[0]):
            cur = nz_vals[s, j]
            if nz_a[j] >= 0:
                b[nz_a[j]] += cur
            if nz_b[j] >= 0:
                b[nz_b[j]] -= cur

        # Current scale for the relative KCL residual test.
        i_scale = ic_max
        for i in range(n_nodes):
            if abs(b[i]) > i_scale:
                i_scale = abs(b[i])
        if i_scale < 1e-15:
            i_scale = 1e-15
        tol_abs = tol * i_scale

        # --- Newton iteration on the sin(phi) nonlinearity ---------------
        # At least one update always runs: the relative test covers only node
        # (KCL) rows, and branch rows are exact only after a linear solve.
        converged = False
        for it in range(max_iter):
            F = np.dot(G, x)
            for i in range(n):
                F[i] -= b[i]
            for j in range(m):
                va = x[jj_a[j]] if jj_a[j] >= 0 else 0.0
                vb = x[jj_b[j]] if jj_b[j] >= 0 else 0.0
                ph = jj_phi[j] + alpha * (va - vb + jj_v[j])
                phi_new[j] = ph
                isin[j] = jj_ic[j] * np.sin(ph)
                if jj_a[j] >= 0:
                    F[jj_a[j]] += isin[j]
                if jj_b[j] >= 0:
                    F[jj_b[j]] -= isin[j]
            resid = 0.0
            for i in range(n_nodes):
                if abs(F[i]) > resid:
                    resid = abs(F[i])
            if it > 0 and resid <= tol_abs:
                converged = True
                break

            y = np.dot(Ginv, F)
            if m > 0:
                for j in range(m):
                    ya = y[jj_a[j]] if jj_a[j] >= 0 else 0.0
                    yb = y[jj_b[j]] if jj_b[j] >= 0 else 0.0
                    d = jj_ic[j] * alpha * np.cos(phi_new[j])
                    rhs[j] = d * (ya - yb)
                    for k in range(m):
                        A[j, k] = d * S0[j, k]
                    A[j, j] += 1.0
                q = np.linalg.solve(A, rhs)
                wq = np.dot(W, q)
                for i in range(n):
                    x[i] += wq[i] - y[i]
            else:
                for i in range(n):
                    x[i] -= y[i]
        if not converged:
            return step_offset + s

        # --- commit element states ---------------------------------------
        for j in range(m):
            va = x[jj_a[j]] if jj_a[j] >= 0 else 0.0
            vb = x[jj_b[j]] if jj_b[j] >= 0 else 0.0
            v_new = va - vb
            jj_phi[j] = jj_phi[j] + alpha * (v_new + jj_v[j])
            jj_icap[j] = jj_geqc[j] * (v_new - jj_v[j]) - jj_icap[j]
            jj_v[j] = v_new
        for j in range(n_cap):
            va = x[cap_a[j]] if cap_a[j] >= 0 else 0.0
            vb = x[cap_b[j]] if cap_b[j] >= 0 else 0.0
            v_new = va - vb
            cap_i[j] = cap_geq[j] * (v_new - cap_v[j]) - cap_i[j]
            cap_v[j] = v_new
        for j in range(n_ind):
            ind_i[j] = x[ind_row[j]]
            va = x[ind_a[j]] if ind_a[j] >= 0 else 0.0
            vb = x[ind_b[j]] if ind_b[j] >= 0 else 0.0
            ind_v[j] = va - vb

        # --- record probes -------------------------------------------------
        for p in range(pr_kind.shape[0]):
            kind = pr_kind[p]
            if kind == 0:
                out[p, s] = x[pr_i1[p]]
            elif kind == 1:
                out[p, s] = jj_phi[pr_i1[p]]
            elif kind == 2:
                va = x[pr_a[p]] if pr_a[p] >= 0 else 0.0
                vb = x[pr_b[p]] if pr_b[p] >= 0 else 0.0
                out[p, s] = (va - vb) * pr_g[p]
            elif kind == 3:
                out[p, s] = cap_i[pr_i1[p]]
            elif kind == 4:
                j = pr_i1[p]
                va = x[pr_a[p]] if pr_a[p] >= 0 else 0.0
                vb = x[pr_b[p]] if pr_b[p] >= 0 else 0.0
                out[p, s] = jj_ic[j] * np.sin(jj_phi[j]) + (va - vb) * pr_g[p] + jj_icap[j]
            elif kind == 5:
                out[p, s] = cs_vals[s, pr_i1[p]]
            else:
                out[p, s] = 0.0

    return -1
