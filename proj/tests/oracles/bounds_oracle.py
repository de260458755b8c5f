"""Independent high-precision evaluation of the closed-form bounds.

Values printed here are frozen into the C++ unit and acceptance tests.
Run: python3 tests/oracles/bounds_oracle.py
"""
from math import comb, ceil, floor
import mpmath as mp

mp.mp.dps = 40


def p1p2(k, m, d, p):
    p = mp.mpf(p)
    good = sum(comb(k, i) * p**i * (1 - p) ** (k - i) for i in range(1, d + 1))
    p1 = 1 - good
    p2 = (1 - p) ** k * sum(comb(m - 1, i) * (p / (1 - p)) ** i for i in range(1, d + 1))
    return p1, p2, -mp.log(p1 + p2)


def plan_t(k, m, d, n, eps):
    de = min(d, m)
    p = mp.mpf(de) / (2 * k) if de <= 2 else mp.mpf(de) / (4 * k)
    _, _, rate = p1p2(k, m, de, p)
    num = mp.log(comb(n, k) * comb(k, k - m + 1)) + mp.log(1 / mp.mpf(eps))
    return max(1, int(mp.ceil(num / rate)))


def components(k, d, n):
    out = []
    top = ceil(mp.log(k, 2) - mp.mpf(10) ** -30) - 1 if k > 1 else -1
    bot = int(floor(mp.log(d, 2) + mp.mpf(10) ** -30))
    for v in range(top, bot - 1, -1):
        kv = min(2 ** (v + 1), n)
        mv = min(2**v, (kv + 1) // 2)
        out.append((kv, mv, min(d, mv), n))
    return out


def tkg(k, d, n, eps):
    return 1 + sum(plan_t(*c, eps) for c in components(k, d, n))


def tsel(k, m, d, n):
    num = k * mp.log(mp.mpf(n) / k) + (k - m + 1) * mp.log(mp.mpf(k) / (k - m + 1)) + 2 * k - m + 1
    if d <= 2:
        return 16 * num
    return num / (mp.mpf(d) * (k - m + 1) / (4 * k) - mp.log(mp.mpf(4) / 3))


def tlt(u, k, d, n):
    return u / mp.log(mp.e * u, 2) * mp.log(mp.mpf(n) / (k * (d + 1)), 2)


print("p1p2(2,1,1,.25)", p1p2(2, 1, 1, 0.25))
print("p1p2(4,3,4,.5)", p1p2(4, 3, 4, 0.5))
print("plan(2,1,1,4,1)", plan_t(2, 1, 1, 4, 1), "eps.5", plan_t(2, 1, 1, 4, 0.5))
print("components(4,1,8)", components(4, 1, 8))
print("plan(4,2,1,8,1)", plan_t(4, 2, 1, 8, 1), "plan(2,1,1,8,1)", plan_t(2, 1, 1, 8, 1))
print("tkg(4,1,8,1)", tkg(4, 1, 8, 1), "tkg(4,1,8,.5)", tkg(4, 1, 8, 0.5))
for eps in (1, 0.5):
    print("tkg k=16 n=256 eps", eps, [tkg(16, d, 256, eps) for d in (1, 2, 4, 8)])
print("tsel(4,2,1,16)", tsel(4, 2, 1, 16))
print("tsel(8,4,3,64)", tsel(8, 4, 3, 64))
print("tlt_leq(9,2,216)", tlt(3, 9, 2, 216))
print("tlt_exact(12,2,288)", tlt(3, 12, 2, 288))
print("claim1(8,4,3)", mp.mpf(5 * 3) / 32 - mp.log(mp.mpf(4) / 3))
worst = None
for k in range(1, 65):
    for m in range(1, k + 1):
        if not 2 * (m - 1) < k:
            continue
        for d in range(1, m + 1):
            p = mp.mpf(d) / (2 * k) if d <= 2 else mp.mpf(d) / (4 * k)
            rate = p1p2(k, m, d, p)[2]
            c = mp.mpf(1) / 16 if d <= 2 else mp.mpf(k - m + 1) * d / (4 * k) - mp.log(mp.mpf(4) / 3)
            gap = rate - c
            if worst is None or gap < worst[0]:
                worst = (gap, k, m, d)
print("claim1 min gap", worst)
