"""Series data shared by the compiled and pure kernels for the Lobachevsky function.

On [-pi/2, pi/2] the function is evaluated as

    L(t) = t - t*log|2t| + sum_{n>=1} zeta(2n) t^(2n+1) / (n (2n+1) pi^(2n)),

which converges like 4^-n on the reduced interval.  ZETA_EVEN[n-1] holds
zeta(2n) to 20 significant digits, n = 1..40.
"""

import math

ZETA_EVEN = (
    1.6449340668482264365,
    1.0823232337111381915,
    1.0173430619844491397,
    1.0040773561979443394,
    1.0009945751278180853,
    1.0002460865533080483,
    1.0000612481350587048,
    1.0000152822594086519,
    1.0000038172932649998,
    1.0000009539620338728,
    1.0000002384505027277,
    1.0000000596081890513,
    1.0000000149015548284,
    1.0000000037253340248,
    1.0000000009313274324,
    1.0000000002328311834,
    1.0000000000582077209,
    1.0000000000145519219,
    1.0000000000036379795,
    1.0000000000009094948,
    1.0000000000002273737,
    1.0000000000000568434,
    1.0000000000000142109,
    1.0000000000000035527,
    1.0000000000000008882,
    1.0000000000000002220,
    1.0000000000000000555,
    1.0000000000000000139,
    1.0000000000000000035,
    1.0000000000000000009,
    1.0000000000000000002,
    1.0000000000000000001,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
    1.0,
)

TERM_TOL = 1e-16


def series_coefficients():
    """Coefficients c_n = zeta(2n) / (n (2n+1) pi^(2n)), n = 1..40."""
    pi2 = math.pi * math.pi
    coefs = []
    p = 1.0
    for n, z in enumerate(ZETA_EVEN, start=1):
        p *= pi2
        coefs.append(z / (n * (2 * n + 1) * p))
    return coefs
