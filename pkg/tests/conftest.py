import numpy as np
import pytest

from emokin.skeleton import JointId, SkeletonClip
from emokin.synth import GeneratorSpec, synth_dataset

# neutral pose used by hand-built fixtures; shoulders 0.4 m apart
BASE = np.array(
    [
        [0.00, 1.60, 0.00],
        [0.20, 1.45, 0.00],
        [-0.20, 1.45, 0.00],
        [0.30, 1.15, 0.04],
        [-0.30, 1.15, 0.04],
        [0.34, 0.95, 0.10],
        [-0.34, 0.95, 0.10],
        [0.00, 1.20, 0.00],
    ]
)


def make_clip(n_frames=60, rate=30.0, mover=None, base=None, **meta):
    """Static clip on the neutral pose; `mover(t) -> dict[JointId, xyz offset]`
    displaces individual joints over time."""
    t = np.arange(n_frames) / rate
    base = BASE if base is None else base
    pos = np.tile(base, (n_frames, 1, 1))
    if mover is not None:
        for i, ti in enumerate(t):
            for jid, off in mover(ti).items():
                pos[i, int(jid)] = base[int(jid)] + np.asarray(off)
    meta.setdefault("nominal_rate", rate)
    return SkeletonClip(times=t, positions=pos, **meta)


def moving_joint_clip(jid, path, n_frames=60, rate=30.0):
    """Clip where one joint follows `path(t) -> xyz offset`, others static."""
    return make_clip(n_frames, rate, mover=lambda ti: {jid: path(ti)})


@pytest.fixture(scope="session")
def small_corpus():
    """48 clips, 4 subjects x 6 classes x 2 reps; enough for pipeline tests."""
    return synth_dataset(GeneratorSpec(subjects=4, clips_per_class=2), seed=11)


@pytest.fixture(scope="session")
def bench_corpus():
    """The standard benchmark corpus: 12 subjects x 6 classes x 5 reps."""
    return synth_dataset(GeneratorSpec(subjects=12, clips_per_class=5), seed=7)


@pytest.fixture(scope="session")
def small_items(small_corpus):
    from emokin.evaluate import extract_items

    return extract_items(small_corpus)
