import pytest

from dialogkit.domains import pizzabot, ticketbot
from dialogkit.models import TrainConfig, train_models
from dialogkit.simulator import SimConfig, generate_dataset

SMALL_TRAIN = TrainConfig(seed=0, emb_dim=16, hidden=24, tagger_hidden=24,
                          window=4, epochs=4, batch_size=48, lr=5e-3)


@pytest.fixture(scope="session")
def pizza_schema():
    return pizzabot.schema()


@pytest.fixture(scope="session")
def pizza_seeds(pizza_schema):
    return pizzabot.seeds(pizza_schema)


@pytest.fixture(scope="session")
def ticket_schema():
    return ticketbot.schema()


@pytest.fixture(scope="session")
def ticket_seeds(ticket_schema):
    return ticketbot.seeds(ticket_schema)


@pytest.fixture(scope="session")
def small_pizza_bundle(pizza_schema, pizza_seeds):
    """A quickly trained pizzabot bundle shared across runtime/service tests."""
    corpus, _ = generate_dataset(pizza_seeds, pizza_schema,
                                 SimConfig(seed=11, num_dialogues=300))
    bundle, _report = train_models(corpus, pizza_schema, SMALL_TRAIN)
    return bundle
