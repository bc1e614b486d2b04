import random

import pytest

from chunkchain.p2p import SimEvent, Simulator


def test_single_node_no_events_unchanged():
    result = Simulator(1, seed=3).run([])
    chain = result.chains["n0"]
    assert chain.tip_index == 0 and chain.mempool == {}


def test_unknown_node_in_schedule_rejected():
    sim = Simulator(2, seed=0)
    with pytest.raises(ValueError):
        sim.run([SimEvent(at=0, kind="inject", node="n9", text="x")])


def test_unknown_event_kind_rejected():
    sim = Simulator(1, seed=0)
    with pytest.raises(ValueError):
        sim.run([SimEvent(at=0, kind="explode")])


def convergence_schedule(n_nodes: int, n_txs: int, seed: int) -> list[SimEvent]:
    rng = random.Random(seed)
    schedule = [SimEvent(at=0, kind="mesh")]
    for i in range(n_txs):
        schedule.append(
            SimEvent(
                at=rng.randint(500, 4000),
                kind="inject",
                node=f"n{rng.randrange(n_nodes)}",
                text=f"message {i}",
            )
        )
    schedule.append(SimEvent(at=6000, kind="mine", node="n0"))
    return schedule


def test_five_nodes_converge_to_identical_chains():
    result = Simulator(5, seed=11).run(convergence_schedule(5, 20, seed=11))
    assert result.chains_identical()
    assert len(set(result.tip_hexes().values())) == 1
    for chain in result.chains.values():
        assert chain.tip_index == 1
        assert len(chain.blocks[1].transactions) == 20
        assert chain.mempool == {}


def test_simulation_is_deterministic():
    schedule = convergence_schedule(3, 8, seed=5)
    first = Simulator(3, seed=5).run(schedule)
    second = Simulator(3, seed=5).run(schedule)
    assert first.tip_hexes() == second.tip_hexes()
    assert first.trace == second.trace
    assert first.delivered == second.delivered


def test_concurrent_miners_fork_and_converge():
    seeds_with_fork = 0
    for seed in range(8):
        sim = Simulator(2, seed=seed)
        schedule = [SimEvent(at=0, kind="mesh")]
        for round_no in range(10):
            at = 1000 + round_no * 1000
            schedule.append(SimEvent(at=at, kind="mine", node="n0"))
            schedule.append(SimEvent(at=at, kind="mine", node="n1"))
        result = sim.run(schedule)
        assert result.chains_identical(), f"seed {seed} diverged"
        if result.abandoned_blocks():
            seeds_with_fork += 1
    assert seeds_with_fork >= 4


def test_drop_model_drops_messages():
    schedule = [SimEvent(at=0, kind="mesh")]
    schedule += [
        SimEvent(at=1000 + i * 10, kind="inject", node="n0", text=f"m{i}") for i in range(10)
    ]
    lossy = Simulator(3, seed=2, drop_rate=0.5).run(schedule)
    assert lossy.dropped > 0


def test_mine_respects_allow_empty():
    sim = Simulator(1, seed=0)
    result = sim.run([SimEvent(at=10, kind="mine", node="n0", allow_empty=False)])
    assert result.chains["n0"].tip_index == 0
    sim = Simulator(1, seed=0)
    result = sim.run([SimEvent(at=10, kind="mine", node="n0", allow_empty=True)])
    assert result.chains["n0"].tip_index == 1
