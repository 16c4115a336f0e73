"""Monte Carlo oracle for the Design 1(i) pilot support rate.

Independent of the C++ code: numpy data generation, FISTA for the
l1-penalized logistic fit, Newton for the post refit.
"""
import numpy as np
from scipy.special import expit
from scipy.stats import norm


def design1(rng, n, p, rho=0.5):
    cov = rho ** np.abs(np.subtract.outer(np.arange(p - 1), np.arange(p - 1)))
    w = rng.multivariate_normal(np.zeros(p - 1), cov, size=n)
    x = np.column_stack([np.ones(n), w])
    beta = 2.0 / np.arange(1, p + 1) ** 2
    y = x @ beta + rng.logistic(size=n)
    return x, y


def fista(z, yu, pen, iters=20000, tol=1e-10):
    n, p = z.shape
    step = 4.0 / (np.linalg.norm(z, 2) ** 2 / n)
    b = np.zeros(p)
    v = b.copy()
    t = 1.0
    for _ in range(iters):
        g = z.T @ (expit(z @ v) - yu) / n
        nb = v - step * g
        nb = np.sign(nb) * np.maximum(np.abs(nb) - step * pen, 0.0)
        nt = (1 + np.sqrt(1 + 4 * t * t)) / 2
        v = nb + (t - 1) / nt * (nb - b)
        if np.max(np.abs(nb - b)) < tol:
            b = nb
            break
        b, t = nb, nt
    return b


def refit(z, yu, support):
    b = np.zeros(z.shape[1])
    if not support:
        return b
    zs = z[:, support]
    c = np.zeros(len(support))
    for _ in range(100):
        m = expit(zs @ c)
        g = zs.T @ (yu - m)
        h = (zs * (m * (1 - m))[:, None]).T @ zs
        c += np.linalg.solve(h, g)
        if np.max(np.abs(g)) < 1e-12:
            break
    b[support] = c
    return b


def algorithm3(z, yu, loops=1, floor=1e-3):
    n, p = z.shape
    gamma = 0.1 / np.log(n)
    lam = 1.1 * np.sqrt(n) * norm.isf(gamma / (2 * p * n))
    l0 = 0.5 * np.sqrt(np.mean(z ** 2, axis=0))
    load = l0
    for m in range(loops + 1):
        b = fista(z, yu, lam * load / n)
        support = list(np.flatnonzero(np.abs(b) > 1e-8))
        post = refit(z, yu, support)
        if m == loops:
            break
        r = yu - expit(z @ post)
        load = np.maximum(np.sqrt(np.mean(z ** 2 * r[:, None] ** 2, axis=0)), floor * l0)
    return support


def main():
    rng = np.random.default_rng(20240615)
    hits, sizes = 0, []
    reps = 50
    for _ in range(reps):
        x, y = design1(rng, 300, 100)
        yu = (y <= 1.0).astype(float)
        s = algorithm3(x, yu)
        sizes.append(len(s))
        hits += {0, 1} <= set(s)
    print("rate", hits / reps, "mean support size", np.mean(sizes))


if __name__ == "__main__":
    main()
