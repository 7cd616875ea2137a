"""Generator + discriminator pair trained online from test results.

The generator maps 100-dimensional uniform noise to a candidate
configuration in [-1, 1]^6; the discriminator regresses a candidate's
fitness.  There is no prior training set: each training round first fits
the discriminator to the executed tests' measured fitness, then freezes
it and trains the generator through it toward the maximum fitness of 1.

The discriminator's relu output is deliberately left unclamped above 1;
acceptance checks elsewhere compare the raw prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .nn import (
    LayerSpec,
    NetworkState,
    NetworkTopology,
    RmspropState,
    backward,
    backward_from_output_grad,
    forward,
    init_network,
    rmsprop_step,
    train_epochs,
)

LATENT_DIM = 100
CANDIDATE_DIM = 6

GENERATOR_TOPOLOGY = NetworkTopology(
    input_dim=LATENT_DIM,
    layers=(
        LayerSpec(128, "tanh"),
        LayerSpec(128, "tanh"),
        LayerSpec(128, "tanh"),
        LayerSpec(CANDIDATE_DIM, "tanh"),
    ),
)

DISCRIMINATOR_TOPOLOGY = NetworkTopology(
    input_dim=CANDIDATE_DIM,
    layers=(
        LayerSpec(8, "tanh"),
        LayerSpec(8, "tanh"),
        LayerSpec(8, "tanh"),
        LayerSpec(1, "relu"),
    ),
)

# (normalized input vector, measured fitness) pairs
SuitePairs = Sequence[tuple[np.ndarray, float]]


@dataclass(frozen=True)
class GanHyperparams:
    """Online training schedule; gen_samples_per_round=None means
    max(32, suite size), resolved per round."""

    disc_epochs: int = 10
    gen_epochs: int = 10
    minibatch: int = 32
    gen_samples_per_round: int | None = None

    def __post_init__(self) -> None:
        if self.disc_epochs < 1 or self.gen_epochs < 1 or self.minibatch < 1:
            raise ValueError("epochs and minibatch must be >= 1")
        if self.gen_samples_per_round is not None and self.gen_samples_per_round < 1:
            raise ValueError("gen_samples_per_round must be >= 1")


@dataclass
class GanModel:
    generator: NetworkState
    discriminator: NetworkState
    latent_dim: int
    gen_opt: RmspropState
    disc_opt: RmspropState


def init_gan(hp: GanHyperparams, rng: np.random.Generator) -> GanModel:
    """Fresh Glorot-initialized networks and empty optimizer caches."""
    generator = init_network(GENERATOR_TOPOLOGY, rng)
    discriminator = init_network(DISCRIMINATOR_TOPOLOGY, rng)
    return GanModel(
        generator=generator,
        discriminator=discriminator,
        latent_dim=LATENT_DIM,
        gen_opt=RmspropState.for_network(generator),
        disc_opt=RmspropState.for_network(discriminator),
    )


def sample_candidates(
    gan: GanModel, k: int, rng: np.random.Generator
) -> np.ndarray:
    """k generator outputs from fresh uniform noise; shape (k, 6) in (-1, 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    noise = rng.uniform(-1.0, 1.0, size=(k, gan.latent_dim))
    return forward(gan.generator, noise)


def predict_fitness(gan: GanModel, inputs: np.ndarray) -> np.ndarray:
    """Discriminator's fitness prediction per row; nonnegative, unclamped."""
    out = forward(gan.discriminator, np.atleast_2d(np.asarray(inputs)))
    return out[:, 0]


def _suite_arrays(suite: SuitePairs) -> tuple[np.ndarray, np.ndarray]:
    if len(suite) == 0:
        raise ValueError("suite must be nonempty")
    inputs = np.vstack([np.asarray(vec, dtype=np.float64) for vec, _ in suite])
    targets = np.array([[f] for _, f in suite], dtype=np.float64)
    return inputs, targets


def train_discriminator(
    gan: GanModel, suite: SuitePairs, hp: GanHyperparams, rng: np.random.Generator
) -> GanModel:
    """Fit the discriminator to measured fitness; generator untouched."""
    inputs, targets = _suite_arrays(suite)
    disc, opt, _ = train_epochs(
        gan.discriminator, (inputs, targets), gan.disc_opt,
        hp.disc_epochs, hp.minibatch, rng,
    )
    return replace(gan, discriminator=disc, disc_opt=opt)


def train_generator(
    gan: GanModel, hp: GanHyperparams, rng: np.random.Generator
) -> GanModel:
    """Push generator outputs toward predicted fitness 1.

    Each round draws fresh noise, runs it through the generator and the
    frozen discriminator, and takes one RMSprop step on the generator
    from the mean-squared distance to the constant target 1.  The
    discriminator only relays its input gradient; its parameters are
    not touched.
    """
    n = hp.gen_samples_per_round if hp.gen_samples_per_round is not None else 32
    generator, gen_opt = gan.generator, gan.gen_opt
    ones = np.ones((n, 1))
    for _ in range(hp.gen_epochs):
        noise = rng.uniform(-1.0, 1.0, size=(n, gan.latent_dim))
        candidates = forward(generator, noise)
        through_disc = backward(gan.discriminator, candidates, ones)
        grads = backward_from_output_grad(generator, noise, through_disc.input_grad)
        generator, gen_opt = rmsprop_step(generator, grads, gen_opt)
    return replace(gan, generator=generator, gen_opt=gen_opt)


def train_gan(
    gan: GanModel, suite: SuitePairs, hp: GanHyperparams, rng: np.random.Generator
) -> GanModel:
    """One online round: discriminator on the suite, then the generator.

    Resolves the default generator sample count to max(32, suite size)
    so the generator sees at least as much noise as there is data.
    """
    hp_resolved = hp
    if hp.gen_samples_per_round is None:
        hp_resolved = replace(hp, gen_samples_per_round=max(32, len(suite)))
    gan = train_discriminator(gan, suite, hp, rng)
    return train_generator(gan, hp_resolved, rng)

