from __future__ import annotations

GRAPH_KINDS = ("real", "complex")
GRAPH_OPS = ("eta", "L", "N", "Omega", "NL")

SEPARABILITY_CRITERIA = ["kyfan", "degree", "ppt", "sufficient"]
GRAPH_ACTIONS = ["to-density", "check-psd", "purity", "entropy", "pt"]
OUTPUT_FORMATS = ["text", "json", "csv"]
REPRODUCE_TARGETS = [
    "table4.7",
    "eq4.28",
    "eq4.29",
    "smolin",
    "dur",
    "grover",
    "heisenberg",
    "wghz",
    "ghzscan",
    "wsuperposition",
    "w-reduced",
]
REPRODUCE_ALIASES = {
    "noisy-thresholds": "table4.7",
    "qutrit-thresholds": "eq4.28",
    "mixed-dim-threshold": "eq4.29",
}

# name -> default parameters; "heisenberg" is addressed as heisenberg:N:s
BUILTIN_STATES = {
    "ghz": {"n": 3},
    "w": {"n": 3},
    "bell": {},
    "smolin": {},
    "dur": {},
    "povm": {},
    "heisenberg": {"n": 4, "s": 2},
    "basis": {"bits": "000"},
}

# published noisy-family thresholds, keyed by (family, N)
TABLE_THRESHOLDS = {
    ("ghz", 3): 0.35355,
    ("ghz", 4): 0.2,
    ("ghz", 5): 0.17675,
    ("ghz", 6): 0.1112,
    ("w", 3): 0.3068,
    ("w", 4): 0.3018,
    ("w", 5): 0.30225,
    ("w", 6): 0.3045,
}
QUTRIT_GHZ_THRESHOLDS = {3: 0.2285, 4: 0.2162}
MIXED_DIM_THRESHOLD = 0.24152
THRESHOLD_TOLERANCE = 5e-4
# noisy W_N with n qubits traced out, keyed by (N, n)
REDUCED_W_THRESHOLDS = {(6, 2): 0.491}

# |112> + |123> + |214> + |234>, 1-based labels on dims (2, 3, 4)
MIXED_DIM_SUPPORT = [(1, 1, 2), (1, 2, 3), (2, 1, 4), (2, 3, 4)]
MIXED_DIM_DIMS = (2, 3, 4)

SCAN_SAMPLES = 101
HEISENBERG_SCAN_N = 20
