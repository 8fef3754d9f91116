"""Closed forms as they appear in print, transcribed verbatim.

Misprints are kept as printed; each one carries the reading that the
mechanical derivation supports. ``w(x)`` stands for the Riccati unknown and
``c`` for the chain constant.
"""

# first-order equation with beta -> a1, alpha -> a0 and c = 1
RICCATI_ORDER1 = "w'(x) + a0(x) + a1(x)*w(x) + w(x)^2"

# ``f`` and bare ``a`` are misprints: read 3*c*w(x) and a1(x)
RICCATI_ORDER2 = (
    "w''(x) + (3*c*f(x) + a2(x))*w'(x) + c*a2(x)*w(x)^2 + c^2*w(x)^3 + a(x)*w(x) + a0(x)"
)
RICCATI_ORDER2_READING = {"f": "w(x)", "a": "a1(x)"}

RICCATI_ORDER3 = (
    "w'''(x) + (4*c*w(x) + a3(x))*w''(x)"
    " + (6*c^2*w(x)^2 + 3*c*a3(x)*w(x) + a2(x))*w'(x) + 3*c*w'(x)^2"
    " + c^3*w(x)^4 + c^2*a3(x)*w(x)^3 + c*a2(x)*w(x)^2 + a1(x)*w(x) + a0(x)"
)

# coefficients low to high: phi, phi', ...
LINEAR_ORDER2 = ("a0(x)", "a1(x)")  # c = 1
LINEAR_ORDER3 = ("c*a0(x)", "a1(x)", "a2(x)")
# printed as "+ c*a0(x) = 0", without the phi factor; read as c*a0(x)*phi(x)
LINEAR_ORDER4 = ("c*a0(x)", "a1(x)", "a2(x)", "a3(x)")
LINEAR_ORDER4_MISSING_PHI = True

GAUGE_ORDER3 = "exp(-1/3*Int(a2(x)))"

# after the subleading term of the order-3 linear equation is removed
DEPRESSED_ORDER3 = {
    1: "a1(x) - a2(x)^2/3 - a2'(x)",
    0: "c*a0(x) - a1(x)*a2(x)^2/3 - 2*a2(x)^2/27 - a2''(x)/3",
}

DEPRESSED_ORDER4 = {
    2: "a2(x) - 3*a3(x)^2/8 - 3*a3'(x)/2",
    1: "a1(x) - a2(x)*a3(x)/2 + a3(x)^3/8 - a3''(x)",
    0: (
        "c*a0(x) - a1(x)*a3(x)/4 + a2(x)*a3(x)^2/16 - 3*a3(x)^4/256"
        " - a2(x)*a3'(x)/4 + 3*a3(x)^2*a3'(x)/32 + 3*a3'(x)^2/16 - a3'''(x)/4"
    ),
}

# Sturm-Liouville (p, q) pairs named for each identification
SL_DEPRESSED3_LEAD = ("2*a2(x)/3", "a1(x)/3")
SL_DEPRESSED4_LEAD = ("a3(x)/2", "a2(x)/6")
SL_DEPRESSED3_CONSTRAINED = ("2*a2(x)/3", "a2(x)/2")

# constraint a1' = 3 c a0; combination (B0 - B1'/3)/a2 with B1, B0 the v', v coefficients
CONSTRAINT_ORDER3 = "a1'(x) = 3*c*a0(x)"
COMBINATION_ORDER3_FACTOR = "1/3"

# constraint a2' = 3 a1 / 2; combination (B1 - 2*B2')/a3, B2 and B1 the v'', v' coefficients
CONSTRAINT_ORDER4 = "a2'(x) = 3*a1(x)/2"
COMBINATION_ORDER4_FACTOR = "2"
TARGET_ORDER4 = "-a2(x) + a3(x)^2/4 + a3'(x)"

# printed coefficients known to disagree with the derivation, by v-derivative order
DEPRESSED_ORDER3_MISPRINTED = (0,)
