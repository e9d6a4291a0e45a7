# Arbitrary-precision evaluation of the thermal quasiparticle loss rate.
# Prints values frozen into test_decay.cpp.
from mpmath import mp, mpf, sqrt, exp, pi

mp.dps = 50
KB_OVER_H_GHZ_PER_MK = mpf("1.380649e-23") / mpf("6.62607015e-34") / mpf(10) ** 12


def gamma_qp(t_mk, f_q_ghz, gap_ghz):
    kt = KB_OVER_H_GHZ_PER_MK * mpf(t_mk)
    x_qp = sqrt(2 * pi * kt / gap_ghz) * exp(-mpf(gap_ghz) / kt)
    return x_qp * 2 * mpf(f_q_ghz) * 1000 * sqrt(2 * mpf(gap_ghz) / f_q_ghz)


for args in [(150, "4.5", "43.5"), (100, "4.5", "43.5"), (200, "4.5", "43.5"), (10, "4.5", "43.5")]:
    t, f, g = args
    print(args, mp.nstr(gamma_qp(t, mpf(f), mpf(g)), 20))
