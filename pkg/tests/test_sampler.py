import numpy as np
import pytest

from citetoy.errors import ParameterError
from citetoy.models import (
    Atoms,
    AuthorModelParams,
    BetaLike,
    CitationParams,
    DiscreteStableParams,
    EliteModelParams,
    FieldModelParams,
    GeometricParams,
    pmf,
)
from citetoy.sampler import (
    RngState,
    empirical_pmf,
    sample_author,
    sample_citations,
    sample_field,
    sample_geometric,
    sample_publications,
    simulate,
    tv_distance,
)


def tv_to(model, values, max_k=100):
    return tv_distance(empirical_pmf(values, max_k), pmf(model, max_k))


# --- degenerate cases ------------------------------------------------------------

def test_geometric_certain_rejection():
    assert np.all(sample_geometric(GeometricParams(1.0), RngState(1), 1000) == 0)


def test_citations_trivial_cases():
    assert np.all(sample_citations(CitationParams(1.0, 0.5), RngState(1), 1000) == 0)
    assert np.all(sample_citations(CitationParams(0.0, 1.0), RngState(1), 1000) == 1)


def test_author_trivial_cases():
    assert np.all(sample_author(AuthorModelParams(0.3, 0.5, 1.0), RngState(2), 1000) == 0)
    assert np.all(sample_author(AuthorModelParams(1.0, 0.5, 0.3), RngState(2), 1000) == 0)


def test_field_vanishing_intensity():
    values = sample_field(FieldModelParams(1e-9, 0.5, 0.5, 0.5), RngState(3), 10 ** 6)
    assert np.mean(values == 0) > 0.999999


def test_scalar_draw_is_an_int():
    v = sample_geometric(GeometricParams(0.5), RngState(5))
    assert isinstance(v, int)


# --- against closed forms ---------------------------------------------------------

def test_geometric_moments():
    values = sample_geometric(GeometricParams(0.5), RngState(42), 10 ** 6)
    assert abs(np.mean(values == 0) - 0.5) < 0.002
    assert abs(values.mean() - 1.0) < 0.01


def test_citation_fidelity():
    values = sample_citations(CitationParams(0.5, 0.5), RngState(42), 10 ** 6)
    assert tv_to(CitationParams(0.5, 0.5), values) < 0.005


def test_author_fidelity():
    model = AuthorModelParams(0.3, 0.6, 0.4)
    assert tv_to(model, sample_author(model, RngState(42), 10 ** 6), max_k=50) < 0.005


def test_elite_heavy_units_fidelity():
    model = EliteModelParams(1.0, 0.8, Atoms(((0.3, 0.5), (0.7, 0.5))))
    assert tv_to(model, simulate(model, RngState(8), 10 ** 5).values) < 0.01


def test_elite_beta_mixing_fidelity():
    model = EliteModelParams(0.7, 1.0, BetaLike(2.0, 1.5))
    assert tv_to(model, simulate(model, RngState(9), 2 * 10 ** 5).values) < 0.01


@pytest.mark.slow
def test_elite_half_stable_fidelity():
    model = EliteModelParams(1.0, 0.5, Atoms(((0.5, 1.0),)))
    assert tv_to(model, simulate(model, RngState(10), 10 ** 4).values) < 0.03


@pytest.mark.parametrize("model", [GeometricParams(0.3), CitationParams(0.2, 0.7)], ids=lambda m: m.family)
def test_tv_shrinks_with_sample_size(model):
    small = tv_to(model, simulate(model, RngState(4), 10 ** 4).values)
    large = tv_to(model, simulate(model, RngState(4), 10 ** 6).values)
    assert large < small


def test_publications_are_shifted_geometric():
    values = sample_publications(0.2, RngState(7), 10 ** 5).values
    assert values.min() >= 1
    assert abs(values.mean() - 5.0) < 0.1
    mixed = sample_publications(Atoms(((0.05, 0.5), (0.5, 0.5))), RngState(7), 10 ** 5).values
    assert abs(mixed.mean() - 0.5 * (20 + 2)) < 0.5


def test_overflow_is_counted_not_hidden():
    batch = simulate(CitationParams(0.0, 0.01), RngState(1), 200)
    assert batch.overflow > 0
    assert batch.values.max() <= 10_000_000


# --- determinism and stream structure ---------------------------------------------

MODELS = [
    GeometricParams(0.3),
    CitationParams(0.2, 0.6),
    AuthorModelParams(0.3, 0.6, 0.4),
    FieldModelParams(1.5, 0.3, 0.6, 0.4),
    EliteModelParams(1.0, 0.9, BetaLike(2.0, 2.0)),
]


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.family)
def test_same_seed_same_draws(model):
    a = simulate(model, RngState(123), 5000).values
    b = simulate(model, RngState(123), 5000).values
    np.testing.assert_array_equal(a, b)
    c = simulate(model, RngState(124), 5000).values
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.family)
def test_workers_do_not_change_output(model):
    n = 3 * (1 << 16) + 17
    one = simulate(model, RngState(5), n, workers=1).values
    four = simulate(model, RngState(5), n, workers=4).values
    np.testing.assert_array_equal(one, four)


def test_advance_skips_draws():
    model = AuthorModelParams(0.3, 0.6, 0.4)
    full = simulate(model, RngState(9), 1000).values
    tail = simulate(model, RngState(9).advance(400), 600).values
    np.testing.assert_array_equal(full[400:], tail)


def test_spawned_streams_differ_and_are_reproducible():
    root = RngState(77)
    a = simulate(GeometricParams(0.3), root.spawn(0), 2000).values
    b = simulate(GeometricParams(0.3), root.spawn(1), 2000).values
    assert not np.array_equal(a, b)
    np.testing.assert_array_equal(a, simulate(GeometricParams(0.3), RngState(77, (0, 0)), 2000).values)
    assert np.corrcoef(a, b)[0, 1] < 0.05


def test_rng_state_validation():
    with pytest.raises(ParameterError):
        RngState(1, (-1,))
    with pytest.raises(ParameterError):
        simulate(GeometricParams(0.3), RngState(1), -1)
    assert RngState(2**64 + 5).key == RngState(5).key
    assert len(simulate(GeometricParams(0.3), RngState(1), 0)) == 0


def test_families_without_a_generative_story_are_rejected():
    with pytest.raises(ParameterError):
        simulate(DiscreteStableParams(1.0, 0.5, 0.5), RngState(1), 10)
