"""Frozen coefficient tables for the K0/K1 evaluator.

Chebyshev coefficients of the scaled functions F_nu(z) = exp(z)*sqrt(z)*K_nu(z)
on two subranges, generated by tools/make_bessel_tables.py against an
arbitrary-precision oracle (max relative error of the fits <= 3.8e-16):

    mid: z in (2, 8],   t = (16/z - 5) / 3
    far: z in (8, inf), t = 16/z - 1

Clenshaw summation uses the full arrays with the usual half-weight on the
leading coefficient. Do not edit by hand; regenerate with the tool.
"""

CHEB_K0_MID = [
    2.4235605209667206,
    -0.02235652605699819,
    0.0007734181154693858,
    -4.281006688886099e-05,
    3.0817001738629747e-06,
    -2.639367222009665e-07,
    2.563713036403469e-08,
    -2.7427055499002012e-09,
    3.1694296580974997e-10,
    -3.902353286962184e-11,
    5.068040698188574e-12,
    -6.889574741007764e-13,
    9.744978497820387e-14,
    -1.4273328418556882e-14,
    2.156412569499643e-15,
    -3.3496541740125565e-16,
    5.3352558401253255e-17,
    -8.69343092217428e-18,
    1.4450811973328195e-18,
    -2.378610360235585e-19,
]

CHEB_K1_MID = [
    2.7744313406973884,
    0.07571989953199368,
    -0.0014410515564754062,
    6.650116955125748e-05,
    -4.369984709520141e-06,
    3.5402774997630525e-07,
    -3.311163779293292e-08,
    3.4459775819010535e-09,
    -3.898932347475427e-10,
    4.720819750465836e-11,
    -6.047835662875354e-12,
    8.128494874865758e-13,
    -1.1386945747141844e-13,
    1.6540358408146118e-14,
    -2.480902566036045e-15,
    3.829237801409389e-16,
    -6.064729274985486e-17,
    9.832161146872169e-18,
    -1.6269487333147755e-18,
    2.6674721496471523e-19,
]

CHEB_K0_FAR = [
    2.487981301736924,
    -0.009174852691025696,
    0.00014445509317750059,
    -4.01361417543571e-06,
    1.5678318108523108e-07,
    -7.770110438521738e-09,
    4.6111825761797193e-10,
    -3.1585929978605575e-11,
    2.4350180393648294e-12,
    -2.0743313873975378e-13,
    1.9257872806048846e-14,
    -1.927554806034515e-15,
    2.0621980291976619e-16,
    -2.3416850980146807e-17,
    2.8059026605065356e-18,
    -3.5305084154730896e-19,
    4.645315118198446e-20,
    -6.368620650574644e-21,
    9.062834803784299e-22,
    -1.303948895633532e-22,
]

CHEB_K1_FAR = [
    2.56379308343739,
    0.02832887813049721,
    -0.00024753706739052506,
    5.771972451607249e-06,
    -2.0689392195365484e-07,
    9.739983441381804e-09,
    -5.585336140380627e-10,
    3.732996634046177e-11,
    -2.8250519610230095e-12,
    2.3720190024833187e-13,
    -2.1766773880070094e-14,
    2.1579141618153512e-15,
    -2.2901969307181044e-16,
    2.582885709882194e-17,
    -3.0767524882273936e-18,
    3.851488519644822e-19,
    -5.0448149098138836e-20,
    6.888664646304767e-21,
    -9.767984933046045e-22,
    1.4011605421959832e-22,
]

# Ascending-series coefficients for z <= 2 (u = z^2/4, 15 terms: the u^14
# term at z = 2 is ~1e-22 relative, far below double rounding).
# I0(z) = sum c_k u^k;  S0 = sum H_k c_k u^k (k >= 1)
# I1(z) = (z/2) sum d_k u^k;  S1 = sum (H_k + H_{k+1} - 2*gamma) d_k u^k
NSER = 15

EULER_GAMMA = 0.5772156649015328606

_fact = [1.0]
for _k in range(1, NSER + 2):
    _fact.append(_fact[-1] * _k)

_H = [0.0]
for _k in range(1, NSER + 2):
    _H.append(_H[-1] + 1.0 / _k)

SER_C = [1.0 / (_fact[k] * _fact[k]) for k in range(NSER)]
SER_CH = [_H[k] / (_fact[k] * _fact[k]) for k in range(NSER)]
SER_D = [1.0 / (_fact[k] * _fact[k + 1]) for k in range(NSER)]
SER_DH = [
    (_H[k] + _H[k + 1] - 2.0 * EULER_GAMMA) / (_fact[k] * _fact[k + 1])
    for k in range(NSER)
]

del _fact, _H, _k
