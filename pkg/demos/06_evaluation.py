"""Average precision, MAP and precision/recall curves.

Run from the repository root:  python3 demos/06_evaluation.py
"""
from teaindex.evaluation import average_precision, curve_csv, mean_average_precision, pr_curve

# %% Relevant, non-relevant, relevant: (1/1 + 2/3) / 2
print(average_precision(["r1", "n", "r2"], {"r1", "r2"}))

run = {"q1": ["a", "b", "c"], "q2": ["x", "b"]}
qrels = {"q1": {"a", "c"}, "q2": {"b"}, "q3": {"z"}}

# %% q3 is absent from the run and counts as 0.
print(mean_average_precision(run, qrels))

# %% Interpolated 11-point curve: precision never rises with recall.
for recall, precision in pr_curve(run["q1"], qrels["q1"], interpolated=True):
    print(f"{recall:.1f} {precision:.3f}")

print(curve_csv(run, qrels))
