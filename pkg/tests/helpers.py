"""Random analysis-record generators and brute-force oracles shared by tests."""
import numpy as np

from conftest import make_record

TARGET_LEVELS = ["both", "neither", "random shooting", "victims targeted"]
WEAPON_LEVELS = ["handgun", "rifle", "shotgun", "multiple handguns"]
GENDER_LEVELS = ["female", "male", "multiple"]
FACTOR_POOL = ["Targets", "Weapon_Type", "Shooter_Gender"]
NUMERIC_POOL = ["Shots_Fired", "Shooter_Age", "Latitude"]


def random_records(rng, n, count_response=False):
    out = []
    for i in range(n):
        t = rng.choice(TARGET_LEVELS)
        w = rng.choice(WEAPON_LEVELS)
        g = rng.choice(GENDER_LEVELS)
        shots = int(rng.integers(1, 30))
        age = float(rng.integers(8, 60))
        lat = float(rng.uniform(25, 49))
        mean = 1.0 + 0.8 * (t == "victims targeted") + 0.1 * shots + 0.02 * age
        if count_response:
            killed = int(rng.poisson(mean / 2))
            wounded = int(rng.poisson(mean / 2))
        else:
            killed, wounded = int(rng.integers(0, 5)), int(rng.integers(0, 8)) + shots // 5
        out.append(make_record(id=f"R{i:04d}", targets=t, weapon_type=w, shooter_gender=g,
                               shots_fired=shots, shooter_age=age, latitude=lat,
                               killed=killed, wounded=wounded))
    return out


def random_formula(rng, max_terms=4):
    pool = FACTOR_POOL + NUMERIC_POOL
    k = int(rng.integers(1, max_terms + 1))
    terms = list(rng.choice(pool, size=k, replace=False))
    return "Casualties ~ " + " + ".join(terms)


def normal_equations(X, y):
    return np.linalg.solve(X.T @ X, X.T @ y)


def rss_lstsq(X, y):
    beta = np.linalg.lstsq(X, y, rcond=None)[0]
    r = y - X @ beta
    return float(r @ r)


def nested_ss(design, y):
    """Type-I sums of squares by explicit nested refits."""
    cols = [0]
    prev = rss_lstsq(design.X[:, cols], y)
    out = []
    for term in design.terms:
        cols = cols + design.term_columns[term]
        cur = rss_lstsq(design.X[:, cols], y)
        out.append(prev - cur)
        prev = cur
    return out


def poisson_irls(X, y, tol=1e-12, maxit=200):
    """Plain Poisson IRLS with log link."""
    mu = y + 0.5
    eta = np.log(mu)
    beta = np.zeros(X.shape[1])
    for _ in range(maxit):
        z = eta + (y - mu) / mu
        w = mu
        new = np.linalg.solve(X.T @ (w[:, None] * X), X.T @ (w * z))
        if np.max(np.abs(new - beta)) < tol:
            return new
        beta = new
        eta = X @ beta
        mu = np.exp(eta)
    return beta
