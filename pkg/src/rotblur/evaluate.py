"""Experiment harness: stability (mean relative error) sweeps, noise
robustness, and nearest-neighbor classification over degraded corpora.

All randomness (parameter subsampling, similarity pairing, noise seeds)
derives from a single experiment seed through numpy SeedSequence keys, so
whole experiment tables are bit-identical across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import corpus as corpus_mod
from .blur import MotionProfile, profile_rcm, profile_uacm, profile_ucm, synthesize_blur
from .image import (SimilarityParams, add_gaussian_noise, apply_similarity,
                    crop_to_support, pad_symmetric, support_radius)
from .invariants import FeatureVector, hu_moments, hu_subset_hm5, hu_subset_lmbmi, rmbmi4, rmbmi6, rmbmi_geometric
from .moments import complex_from_geometric, geometric_moments, normalize_complex, normalize_geometric

#: Feature names of the noise-robust subset used for low-SNR classification.
NOISE_ROBUST_NAMES = ("c11", "c22", "re_c10_c21", "re_c20_c31")


# --- feature families ------------------------------------------------------

def _features_rmbmi4(img):
    cm = normalize_complex(complex_from_geometric(geometric_moments(img, 4)))
    return rmbmi4(cm, similarity_normalized=True)


def _features_rmbmi6(img):
    cm = normalize_complex(complex_from_geometric(geometric_moments(img, 6)))
    return rmbmi6(cm, similarity_normalized=True)


def _features_geometric(img):
    gm = normalize_geometric(geometric_moments(img, 4))
    return rmbmi_geometric(gm, similarity_normalized=True)


def _features_hu(img):
    return hu_moments(normalize_geometric(geometric_moments(img, 3)))


def _features_hm5(img):
    return hu_subset_hm5(_features_hu(img))


def _features_lmbmi(img):
    return hu_subset_lmbmi(_features_hu(img))


FEATURE_FAMILIES = {
    "rmbmi4": _features_rmbmi4,
    "rmbmi6": _features_rmbmi6,
    "geometric": _features_geometric,
    "hu7": _features_hu,
    "hm5": _features_hm5,
    "lmbmi": _features_lmbmi,
}


def extract_features(img, family: str) -> FeatureVector:
    try:
        fn = FEATURE_FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown feature family {family!r}; choose from {sorted(FEATURE_FAMILIES)}")
    return fn(img)


# --- metrics and classifier ------------------------------------------------

@dataclass(frozen=True)
class LabeledFeatureSet:
    """Feature vectors with class labels sharing one name ordering."""

    feature_names: tuple[str, ...]
    entries: tuple[tuple[object, FeatureVector], ...]

    def __post_init__(self):
        for _, fv in self.entries:
            if fv.names != self.feature_names:
                raise ValueError("all entries must share the set's feature names")
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def build(cls, labels, vectors):
        vectors = list(vectors)
        if not vectors:
            raise ValueError("empty feature set")
        return cls(vectors[0].names, tuple(zip(labels, vectors)))


def mre(reference: FeatureVector, degraded_list) -> np.ndarray:
    """Per-feature mean relative error in percent.

    For each feature the symmetric relative difference
    |ref - deg| / (|ref| + |deg|) is averaged over the degraded versions
    (0/0 counts as 0) and scaled by 100.  Pairs where either vector flags
    the feature degenerate are excluded from that feature's average --
    a ratio whose denominator a blur profile annihilates carries no
    information, the same policy the classifier distance applies.  A
    feature with no valid pairs reports 0.
    """
    degraded_list = list(degraded_list)
    if not degraded_list:
        raise ValueError("degraded_list must be non-empty")
    acc = np.zeros(len(reference))
    cnt = np.zeros(len(reference))
    for deg in degraded_list:
        if deg.names != reference.names:
            raise ValueError("feature names mismatch")
        keep = ~(reference.flags | deg.flags)
        denom = np.abs(reference.values) + np.abs(deg.values)
        diff = np.abs(reference.values - deg.values)
        term = np.divide(diff, denom, out=np.zeros_like(diff), where=denom > 0)
        acc += np.where(keep, term, 0.0)
        cnt += keep
    return np.divide(acc, cnt, out=np.zeros_like(acc), where=cnt > 0) * 100.0


def corpus_mre(pairs) -> np.ndarray:
    """Average the per-image MRE over a corpus of (reference, degraded_list)."""
    rows = [mre(ref, degs) for ref, degs in pairs]
    return np.mean(rows, axis=0)


def chi_square_distance(x: FeatureVector, y: FeatureVector) -> float:
    """Modified chi-square distance sum (x-y)^2 / (|x| + |y|).

    Zero-denominator terms contribute 0; features flagged degenerate in
    either vector are excluded pairwise.
    """
    if x.names != y.names:
        raise ValueError("feature names mismatch")
    keep = ~(x.flags | y.flags)
    xv, yv = x.values[keep], y.values[keep]
    denom = np.abs(xv) + np.abs(yv)
    num = (xv - yv) ** 2
    terms = np.divide(num, denom, out=np.zeros_like(num), where=denom > 0)
    return float(terms.sum())


def nn_classify(train: LabeledFeatureSet, test: LabeledFeatureSet,
                distance=chi_square_distance):
    """Nearest-neighbor labels and accuracy; ties go to the lowest train index."""
    if not train.entries or not test.entries:
        raise ValueError("train and test sets must be non-empty")
    predicted = []
    correct = 0
    for true_label, fv in test.entries:
        best = min(range(len(train.entries)),
                   key=lambda i: distance(train.entries[i][1], fv))
        label = train.entries[best][0]
        predicted.append(label)
        if label == true_label:
            correct += 1
    return predicted, correct / len(test.entries)


def standardize(train: LabeledFeatureSet, test: LabeledFeatureSet):
    """Z-score both sets using per-feature training statistics.

    Features with zero training variance are flagged and passed through
    unscaled (still mean-centered by 0).
    """
    tr = np.array([fv.values for _, fv in train.entries])
    mean = tr.mean(axis=0)
    std = tr.std(axis=0)
    constant = std == 0.0

    def transform(fs: LabeledFeatureSet) -> LabeledFeatureSet:
        entries = []
        for label, fv in fs.entries:
            vals = np.where(constant, fv.values, (fv.values - mean) / np.where(constant, 1.0, std))
            entries.append((label, FeatureVector(fv.names, vals, fv.flags | constant)))
        return LabeledFeatureSet(fs.feature_names, tuple(entries))

    return transform(train), transform(test)


# --- degradation protocol ---------------------------------------------------

OMEGAS = tuple(k * math.pi / 20.0 for k in range(1, 11))
ALPHAS = tuple(k * math.pi / 200.0 for k in range(1, 11))
EXPOSURES = (1.0, 2.0, 3.0, 4.0, 5.0)
SIM_ANGLES = tuple(k * math.pi / 6.0 for k in range(1, 11))
SIM_SCALES = (0.6, 0.8, 1.0, 1.2, 1.4)

MODELS = ("ucm", "uacm", "rcm")


def model_profile(model: str, params: tuple) -> MotionProfile:
    if model == "ucm":
        omega, exposure = params
        return profile_ucm(omega, exposure)
    if model == "uacm":
        omega, alpha, exposure = params
        return profile_uacm(omega, alpha, exposure)
    if model == "rcm":
        omega, alpha, exposure = params
        return profile_rcm(omega, alpha, exposure)
    raise ValueError(f"unknown blur model {model!r}")


def model_param_grid(model: str) -> list[tuple]:
    """Full parameter grid for one blur model."""
    if model == "ucm":
        return [(w, t) for w in OMEGAS for t in EXPOSURES]
    if model in ("uacm", "rcm"):
        return [(w, a, t) for w in OMEGAS for a in ALPHAS for t in EXPOSURES]
    raise ValueError(f"unknown blur model {model!r}")


def select_blur_params(model: str, count: int, rng: np.random.Generator) -> list[tuple]:
    """Deterministically pick ``count`` parameter tuples from the model grid.

    The accelerated/reciprocating grids hold 500 combinations while the
    protocol uses 50 degradations per image, so those are subsampled.
    """
    grid = model_param_grid(model)
    if count == len(grid):
        return grid
    if count > len(grid):
        raise ValueError(f"count {count} exceeds grid size {len(grid)} for {model}")
    idx = np.sort(rng.choice(len(grid), size=count, replace=False))
    return [grid[i] for i in idx]


def select_similarity_params(count: int, rng: np.random.Generator) -> list[SimilarityParams]:
    """Random draw of ``count`` similarity transforms from the protocol grid."""
    grid = [SimilarityParams(phi, s) for phi in SIM_ANGLES for s in SIM_SCALES]
    if count == len(grid):
        order = rng.permutation(len(grid))
    else:
        order = rng.choice(len(grid), size=count, replace=True)
    return [grid[i] for i in order]


def noise_seed(experiment_seed: int, counter: int) -> int:
    """Counter-derived child seed, reproducible independent of draw order."""
    return int(np.random.SeedSequence([experiment_seed, counter]).generate_state(1)[0])


def ensure_headroom(img, s_max: float):
    """Pad so the scaled support fits inside the frame at any rotation."""
    half = (min(img.shape) - 1) / 2.0
    needed = support_radius(img) * s_max
    if needed <= half:
        return img
    return pad_symmetric(img, int(math.ceil(needed - half)) + 1)


def degrade(img, model: str, params: tuple, sim: SimilarityParams | None,
            n_steps: int | None = None) -> np.ndarray:
    """Similarity transform (optional) followed by rotational motion blur.

    After scaling, the frame is cropped back to the content support (tight
    framing, as a photograph of the object would be).  This leaves every
    moment unchanged but keeps frame area -- and hence the power of any
    noise added downstream at a fixed SNR -- proportional to the content.
    """
    if sim is not None:
        img = crop_to_support(apply_similarity(img, sim))
    return synthesize_blur(img, model_profile(model, params), n_steps)


# --- experiments ------------------------------------------------------------

@dataclass
class MreReport:
    """Per-feature MRE table: rows are features, columns degradation cases."""

    feature_names: tuple[str, ...]
    columns: tuple[str, ...]
    table: np.ndarray  # shape (features, columns), percent
    corpus_descriptor: str = ""

    def __post_init__(self):
        assert np.all((self.table >= 0.0) & (self.table <= 100.0))

    def column(self, name: str) -> np.ndarray:
        return self.table[:, self.columns.index(name)]

    def rows(self):
        for i, name in enumerate(self.feature_names):
            yield name, self.table[i]


def _load_corpus(config: dict) -> list[np.ndarray]:
    spec = config["corpus"]
    if "dir" in spec:
        return corpus_mod.load_corpus(spec["dir"])
    if "synthetic" in spec:
        syn = spec["synthetic"]
        kind = syn.get("kind", "stability")
        if kind == "stability":
            return corpus_mod.stability_corpus(syn.get("count", 10), syn.get("size", 257),
                                               syn.get("seed", 1234))
        if kind == "classification":
            return corpus_mod.classification_corpus(syn.get("count", 20), syn.get("size", 257),
                                                    syn.get("seed", 99))
        raise ValueError(f"unknown synthetic corpus kind {kind!r}")
    raise ValueError("corpus config needs 'dir' or 'synthetic'")


def _sim_modes(similarity) -> list[bool]:
    if similarity == "both":
        return [False, True]
    return [bool(similarity)]


def run_stability_experiment(config: dict) -> MreReport:
    """MRE of each invariant under blur (and optional similarity) sweeps.

    Config keys: corpus, models, similarity (False/True/"both"),
    degradations_per_image, feature_family, n_steps, snr_db (optional
    per-degradation noise), seed.
    """
    images = _load_corpus(config)
    if len(images) < 2:
        raise ValueError("stability corpus needs at least 2 images")
    models = config.get("models", ["ucm"])
    family = config.get("feature_family", "geometric")
    count = config.get("degradations_per_image", 50)
    n_steps = config.get("n_steps")
    snr_db = config.get("snr_db")
    seed = config.get("seed", 0)
    sim_modes = _sim_modes(config.get("similarity", "both"))

    rng = np.random.default_rng(seed)
    blur_sets = {m: select_blur_params(m, count, rng) for m in models}
    sims = select_similarity_params(count, rng)
    s_max = max(s.s for s in sims) if any(sim_modes) else 1.0
    images = [ensure_headroom(img, s_max) for img in images]

    refs = [extract_features(img, family) for img in images]
    columns = []
    cols = []
    counter = 0
    for model in models:
        for with_sim in sim_modes:
            pairs = []
            for img, ref in zip(images, refs):
                degraded = []
                for j, params in enumerate(blur_sets[model]):
                    sim = sims[j] if with_sim else None
                    out = degrade(img, model, params, sim, n_steps)
                    if snr_db is not None:
                        out = add_gaussian_noise(out, snr_db, noise_seed(seed, counter))
                    counter += 1
                    degraded.append(extract_features(out, family))
                pairs.append((ref, degraded))
            columns.append(f"{model}_{'y' if with_sim else 'n'}")
            cols.append(corpus_mre(pairs))
    table = np.stack(cols, axis=1)
    return MreReport(refs[0].names, tuple(columns), table,
                     corpus_descriptor=f"{len(images)} images, family={family}")


@dataclass
class ClassificationResult:
    """Accuracy tables from one classification run."""

    columns: tuple[str, ...]
    accuracy: dict = field(default_factory=dict)        # family -> per-column accuracies
    noise_accuracy: dict = field(default_factory=dict)  # snr_db -> per-column accuracies


def run_classification_experiment(config: dict) -> ClassificationResult:
    """Nearest-neighbor classification of degraded test sets.

    Builds count-per-class blurred (optionally similarity-transformed) test
    sets for each model, classifies with each configured feature family
    against the clean training images, and optionally repeats with added
    Gaussian noise using the noise-robust feature subset.
    """
    images = _load_corpus(config)
    if len(images) < 2:
        raise ValueError("classification corpus needs at least 2 classes")
    models = config.get("models", list(MODELS))
    families = config.get("features", ["rmbmi4", "hm5", "lmbmi"])
    count = config.get("degradations_per_image", 50)
    n_steps = config.get("n_steps")
    seed = config.get("seed", 0)
    sim_modes = _sim_modes(config.get("similarity", "both"))
    noise_cfg = config.get("noise") or {}
    snr_list = noise_cfg.get("snr_db", [])
    noise_names = tuple(noise_cfg.get("feature_names", NOISE_ROBUST_NAMES))
    noise_family = noise_cfg.get("feature_family", "rmbmi4")

    rng = np.random.default_rng(seed)
    blur_sets = {m: select_blur_params(m, count, rng) for m in models}
    sims = select_similarity_params(count, rng)
    s_max = max(s.s for s in sims) if any(sim_modes) else 1.0
    images = [ensure_headroom(img, s_max) for img in images]
    labels = list(range(len(images)))

    trains = {fam: LabeledFeatureSet.build(labels, [extract_features(im, fam) for im in images])
              for fam in set(families) | {noise_family}}

    result = ClassificationResult(columns=tuple(
        f"{m}_{'y' if ws else 'n'}" for m in models for ws in sim_modes))
    for fam in families:
        result.accuracy[fam] = []
    for snr in snr_list:
        result.noise_accuracy[snr] = []

    counter = 0
    for model in models:
        for with_sim in sim_modes:
            blurred = []   # (label, image)
            for label, img in zip(labels, images):
                for j, params in enumerate(blur_sets[model]):
                    sim = sims[j] if with_sim else None
                    blurred.append((label, degrade(img, model, params, sim, n_steps)))
            for fam in families:
                test = LabeledFeatureSet.build(
                    [lbl for lbl, _ in blurred],
                    [extract_features(im, fam) for _, im in blurred])
                _, acc = nn_classify(trains[fam], test)
                result.accuracy[fam].append(acc)
            for snr in snr_list:
                vectors = []
                for k, (lbl, im) in enumerate(blurred):
                    noisy = add_gaussian_noise(im, snr, noise_seed(seed, counter + k))
                    vectors.append(extract_features(noisy, noise_family).subset(noise_names))
                counter += len(blurred)
                test = LabeledFeatureSet.build([lbl for lbl, _ in blurred], vectors)
                train_sub = LabeledFeatureSet.build(
                    labels, [fv.subset(noise_names) for _, fv in trains[noise_family].entries])
                _, acc = nn_classify(train_sub, test)
                result.noise_accuracy[snr].append(acc)
    return result
