"""Why fitting a line to a log-log plot mis-estimates the exponent.

Generates discrete power-law samples with a known exponent and compares
three graphical read-offs (raw histogram, complementary CDF, logarithmic
binning) against the maximum-likelihood fit. Least squares on the raw
histogram is systematically biased low; the complementary CDF needs its
+1 slope correction; the MLE just works.
"""

import numpy as np

from adrank import (
    ModelId,
    RandomSource,
    eccdf,
    log_binned_histogram,
    loglog_exponent_estimate,
    mle_fit,
    random_sample,
    raw_histogram,
)

TRUE_ALPHA = 2.5
N = 20_000
SEEDS = 25

raw_hat, ecc_hat, bin_hat, mle_hat = [], [], [], []
for seed in range(SEEDS):
    sample = random_sample(
        ModelId.POWERLAW, {"alpha": TRUE_ALPHA, "xmin": 1.0}, N, RandomSource(seed)
    )
    raw_hat.append(loglog_exponent_estimate(raw_histogram(sample)))
    ecc_hat.append(loglog_exponent_estimate(eccdf(sample)))  # +1 applied
    bin_hat.append(loglog_exponent_estimate(log_binned_histogram(sample, base=2)))
    mle_hat.append(mle_fit(ModelId.POWERLAW, sample).params["alpha"])

print(f"true exponent {TRUE_ALPHA}, {SEEDS} samples of n={N}\n")
print(f"{'estimator':34s}{'median':>8s}{'spread':>8s}")
for label, values in [
    ("raw histogram + least squares", raw_hat),
    ("complementary CDF (+1 corrected)", ecc_hat),
    ("log-binned histogram (uncorrected)", bin_hat),
    ("maximum likelihood", mle_hat),
]:
    arr = np.asarray(values)
    print(f"{label:34s}{np.median(arr):8.3f}{arr.std():8.3f}")

print("""
The raw histogram's sparse tail drags the fitted line flat, so the
least-squares exponent sits far below the truth. The complementary CDF
removes the tail noise but measures alpha - 1 by construction, hence the
correction. The likelihood estimate needs no plotting conventions at all.

Use `adrank plotdata --method gm1|gm2|gm3 --fitline` to emit these series
for an external plotting tool.""")
