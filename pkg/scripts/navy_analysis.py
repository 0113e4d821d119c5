"""Default and adaptive ScreenMin on the packaged adenoma p-values."""
from screenmin.io import load_navy
from screenmin.testing import bonferroni_max, screenmin
from screenmin.thresholds import ThresholdSpec

ALPHA = 0.05


def main():
    mat = load_navy()
    print(f"m = {mat.m}")
    for spec in (ThresholdSpec.default(), ThresholdSpec.adaptive()):
        res = screenmin(mat, spec, ALPHA)
        print(f"{spec.label:>9}: c = {res.threshold.c:.4e}, |S| = {res.n_selected}, "
              f"testing at {res.testing_threshold:.4e}, rejections = {res.n_rejected}")
        chosen = ", ".join(mat.ids[i] for i in res.selected[:5])
        print(f"           first selected: {chosen}")
    bonf = bonferroni_max(mat, ALPHA)
    print(f"bonferroni on maxima: testing at {bonf.testing_threshold:.4e}, rejections = {bonf.n_rejected}")


if __name__ == "__main__":
    main()
