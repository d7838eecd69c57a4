'''Close contests.

As lambda2 approaches lambda1 the weaker strain lingers longer, and the
Gumbel scale 1/eta2 grows like lambda1/(lambda1 - lambda2).  For unit
recovery rates a second centering applies.  This script tabulates both
centerings along a ray of ever closer contests, with N growing fast enough
that N (lambda1 - lambda2)^3 stays large.
'''
from sis_competition import ModelParams, classify_regime, predict_kappa_nearcrit, predict_kappa_thm2

print("  l1-l2         N   regime        statistic   loc (general)  loc (close)   scale")
for d in (0.08, 0.04, 0.02, 0.01, 0.005):
    p = ModelParams(1.1, 1.0, 1.1 - d, 1.0, int(2e3 / d**3))
    general = predict_kappa_thm2(p, 0.25, 0.25)
    close = predict_kappa_nearcrit(p, 0.25, 0.25)
    reg = classify_regime(p)
    print(f"{d:7.3f}  {p.n:9.2e}  {reg.tag.value:12s}  {reg.statistic:9.1f}  "
          f"{general.location:13.2f}  {close.location:11.2f}  {close.scale:6.1f}")
