"""Values frozen from scripts/compute_oracles.py (adaptive quadrature, no package code)."""

# sup over intervals of avg(|x|^{1/2}) avg(|x|^{-1/2}); maximizer [c, 1] with c below
A2_SQRT = 1.500000000000
A2_SQRT_ARGMAX_C = -0.071797
# same functional on intervals centered at 0
A2_SQRT_CENTERED = 1.333333333333
# sup over intervals of avg(|x|)^{1/2} / avg(|x|^{1/2})
RH2_SQRT = 1.087663873581
# int_0^1 |x - y|^{-1/2} dy
FRAC_INDICATOR = {1.25: 1.236067977500, 1.5: 1.035276180410, 2.0: 0.828427124746,
                  -1.25: 0.763932022500, -2.0: 0.635674490392}
# int_0^1 t^{1/2} dt / t
DINI_SQRT = 2.0
