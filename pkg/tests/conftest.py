import numpy as np
import pytest

from lsro_core.config import EvalConfig, ExperimentConfig, GanConfig, NetworkConfig, SynthConfig, TrainConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_synth():
    return SynthConfig(
        num_identities=12,
        cameras=2,
        samples_per_identity_per_camera=(2, 4),
        feature_dim=6,
        identity_spread=2.0,
        camera_shift_scale=0.2,
        noise_sigma=0.3,
        heldout_identities=4,
        train_fraction=0.5,
        seed=3,
    )


@pytest.fixture
def tiny_experiment(tiny_synth):
    """A full experiment that runs in well under a second per cell."""
    return ExperimentConfig(
        synth=tiny_synth,
        gan=GanConfig(latent_dim=4, gen_hidden=[8], disc_hidden=[8], epochs=2, batch_size=8),
        net=NetworkConfig(hidden_dims=[8], embed_dim=4, dropout_rate=0.2),
        train=TrainConfig(epochs=3, batch_size=8, lr_initial=0.01, lr_after_decay=0.001, decay_epoch=2, pseudo_warmup_epochs=1),
        eval=EvalConfig(k_max=10),
        generated_multiples=[0, 1],
        repeats=2,
    )
