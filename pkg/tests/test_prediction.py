import pytest

from antwatch.classifier import init_weights
from antwatch.detection import Zone
from antwatch.errors import CorrectionError, UntrainedModelError
from antwatch.grid import MOVES
from antwatch.modelfile import ColonyModel, model_digest
from antwatch.prediction import (
    WalkNode,
    WalkTree,
    apply_correction,
    best_matching_state,
    expand_walk,
    live_predict,
    node_path,
    prune_walk,
    refine_across_frames,
    tree_to_json,
    zone_observations,
)
from antwatch.states import (
    MovementState,
    Observation,
    StateTriple,
    TransitionModel,
    build_transition_model,
)

A = MovementState(1, 1, "stay")
B = MovementState(1, 1, "E")
C = MovementState(2, 1, "W")
D = MovementState(2, 1, "stay")


def trained(transitions, observations=(), zones=(), influence_radius=5.0):
    return ColonyModel(
        transitions=transitions,
        observations=list(observations),
        table=init_weights(0),
        stop_reason="converged",
        epochs=1,
        influence_radius=influence_radius,
        zones=list(zones),
    )


def chain_model():
    """Deterministic two-hop chain, then uniform fog."""
    a = MovementState(3, 3, "E")
    b = MovementState(4, 3, "E")
    c = MovementState(5, 3, "stay")
    transitions = build_transition_model([[a, b, c]], smoothing_alpha=0.0, width=8, height=8)
    return a, b, c, trained(transitions)


def four_state_model():
    """Small loop with hand-set counts; smoothing keeps all 9 branches alive."""
    transitions = TransitionModel(width=4, height=4, smoothing_alpha=0.5)
    transitions.counts[A] = {B: 3.0, A: 1.0}
    transitions.counts[B] = {C: 2.0, D: 1.0}
    transitions.counts[C] = {A: 1.0, B: 1.0}
    transitions.counts[D] = {D: 4.0}
    return trained(transitions)


def test_expand_walk_argument_validation():
    _, _, _, model = chain_model()
    start = MovementState(3, 3, "E")
    with pytest.raises(ValueError):
        expand_walk(start, model, threshold=0.0)
    with pytest.raises(ValueError):
        expand_walk(start, model, threshold=1.5)
    with pytest.raises(ValueError):
        expand_walk(start, model, depth_limit=-1)
    untrained = ColonyModel(transitions=model.transitions)
    with pytest.raises(UntrainedModelError):
        expand_walk(start, untrained)


def test_certain_chain_survives_threshold_one():
    a, b, c, model = chain_model()
    tree = expand_walk(a, model, depth_limit=4, threshold=1.0)
    states = [n.state for n in tree.nodes()]
    assert states == [a, b, c]
    assert [n.path_probability for n in tree.nodes()] == [1.0, 1.0, 1.0]


def test_uniform_row_dies_below_half_threshold():
    a, b, c, model = chain_model()
    tree = expand_walk(a, model, depth_limit=6, threshold=0.5)
    assert [n.state for n in tree.nodes()] == [a, b, c]
    # loosening the threshold lets the uniform fan past c through
    wide = expand_walk(a, model, depth_limit=3, threshold=0.05)
    nodes = wide.nodes()
    assert len(nodes) == 12
    fan = [n for n in nodes if n.depth == 3]
    assert [n.state.move for n in fan] == list(MOVES)
    assert all(n.path_probability == pytest.approx(1 / 9) for n in fan)


def test_depth_zero_gives_root_only():
    a, _, _, model = chain_model()
    tree = expand_walk(a, model, depth_limit=0, threshold=1e-6)
    assert len(tree.nodes()) == 1
    assert tree.nodes()[0].path_probability == 1.0


def test_children_probabilities_multiply_along_paths():
    model = four_state_model()
    tree = expand_walk(A, model, depth_limit=4, threshold=1e-3)

    def check(node):
        row = model.transitions.row(node.state)
        for child in node.children:
            assert child.state in row
            assert child.path_probability == node.path_probability * row[child.state]
            assert child.depth == node.depth + 1
            check(child)

    assert tree.root.path_probability == 1.0
    check(tree.root)


def enumerate_paths(transitions, state, depth, path_p, depth_limit, threshold, out):
    out.append((state.x, state.y, state.move, depth, path_p))
    if depth == depth_limit:
        return
    for succ, p in transitions.row(state).items():
        if p > 0 and path_p * p >= threshold:
            enumerate_paths(transitions, succ, depth + 1, path_p * p, depth_limit, threshold, out)


def test_walk_tree_matches_exhaustive_enumeration():
    model = four_state_model()
    depth, threshold = 5, 1e-3
    tree = expand_walk(A, model, depth_limit=depth, threshold=threshold)
    got = sorted(
        (n.state.x, n.state.y, n.state.move, n.depth, n.path_probability)
        for n in tree.nodes()
    )
    expected: list = []
    enumerate_paths(model.transitions, A, 0, 1.0, depth, threshold, expected)
    expected.sort()
    assert len(got) == len(expected)
    for g, e in zip(got, expected):
        assert g[:4] == e[:4]
        assert abs(g[4] - e[4]) <= 1e-12


def test_prune_same_threshold_is_identity():
    model = four_state_model()
    tree = expand_walk(A, model, depth_limit=4, threshold=1e-2)
    again = prune_walk(tree, 1e-2)
    assert tree_to_json(again) == tree_to_json(tree)


def test_prune_stricter_threshold_is_subset():
    model = four_state_model()
    tree = expand_walk(A, model, depth_limit=5, threshold=1e-3)
    pruned = prune_walk(tree, 5e-2)
    before = {(n.state, n.depth, n.path_probability) for n in tree.nodes()}
    after = {(n.state, n.depth, n.path_probability) for n in pruned.nodes()}
    assert after <= before
    assert len(after) < len(before)
    for node in pruned.nodes():
        if node.depth > 0:
            assert node.path_probability >= 5e-2
    assert pruned.threshold == 5e-2


def test_prune_backtracks_through_emptied_internal_nodes():
    # x only existed to reach y; once y goes, x goes too.  z was a leaf all
    # along, so it stays.
    y = WalkNode(MovementState(2, 2, "N"), 0.01, "other", 2)
    x = WalkNode(MovementState(1, 2, "E"), 0.4, "other", 1, [y])
    z = WalkNode(MovementState(1, 0, "S"), 0.4, "other", 1)
    root = WalkNode(MovementState(1, 1, "stay"), 1.0, "other", 0, [x, z])
    pruned = prune_walk(WalkTree(root, 1e-3), 0.05)
    cells_left = [n.state for n in pruned.nodes()]
    assert cells_left == [root.state, z.state]


def test_prune_keeps_root_even_when_everything_else_dies():
    leaf = WalkNode(MovementState(1, 2, "E"), 0.2, "other", 1)
    root = WalkNode(MovementState(1, 1, "stay"), 1.0, "other", 0, [leaf])
    pruned = prune_walk(WalkTree(root, 0.1), 0.9)
    assert [n.state for n in pruned.nodes()] == [root.state]
    with pytest.raises(ValueError):
        prune_walk(WalkTree(root, 0.1), 0.0)


def test_tree_json_ids_are_breadth_first_and_linked():
    model = four_state_model()
    tree = expand_walk(A, model, depth_limit=3, threshold=1e-2)
    data = tree_to_json(tree)
    nodes = data["nodes"]
    assert [n["id"] for n in nodes] == list(range(len(nodes)))
    assert nodes[0]["parent"] is None
    by_id = {n["id"]: n for n in nodes}
    for n in nodes[1:]:
        assert n["parent"] < n["id"]
        assert by_id[n["parent"]]["depth"] == n["depth"] - 1
    # parent links reproduce node_path for every node
    for n in nodes:
        chain = []
        cursor = n
        while cursor is not None:
            chain.append(MovementState(cursor["x"], cursor["y"], cursor["move"]))
            cursor = by_id.get(cursor["parent"])
        assert list(reversed(chain)) == node_path(tree, n["id"])


def test_node_path_unknown_id():
    model = four_state_model()
    tree = expand_walk(A, model, depth_limit=1, threshold=1e-2)
    with pytest.raises(CorrectionError):
        node_path(tree, 999)


def test_prune_correction_removes_edge_from_future_walks():
    model = four_state_model()
    tree = expand_walk(A, model, depth_limit=2, threshold=1e-3)
    apply_correction(model, tree, "prune", [A, B])
    assert (A, B) in model.transitions.blocked
    after = expand_walk(A, model, depth_limit=2, threshold=1e-3)
    assert B not in [n.state for n in after.nodes() if n.depth == 1]


def test_boost_correction_raises_branch_probability():
    model = four_state_model()
    tree = expand_walk(A, model, depth_limit=2, threshold=1e-3)
    p_before = model.transitions.row(A)[B]
    apply_correction(model, tree, "boost", [A, B], factor=3.0)
    assert model.transitions.row(A)[B] > p_before


def test_boost_factor_one_leaves_model_bytes_unchanged():
    model = four_state_model()
    tree = expand_walk(A, model, depth_limit=2, threshold=1e-3)
    digest = model_digest(model)
    apply_correction(model, tree, "boost", [A, B], factor=1.0)
    assert model_digest(model) == digest


def test_correction_rejects_bad_requests():
    model = four_state_model()
    tree = expand_walk(A, model, depth_limit=2, threshold=1e-3)
    with pytest.raises(CorrectionError):
        apply_correction(model, tree, "prune", [A])  # root only
    with pytest.raises(CorrectionError):
        apply_correction(model, tree, "prune", [B, C])  # wrong root
    with pytest.raises(CorrectionError):
        apply_correction(model, tree, "prune", [A, MovementState(0, 0, "N")])
    with pytest.raises(CorrectionError):
        apply_correction(model, tree, "sever", [A, B])
    with pytest.raises(CorrectionError):
        apply_correction(model, tree, "boost", [A, B], factor=0.0)


def frame_estimates():
    return [
        [(A, StateTriple(0.5, 0.2, 0.3)), (B, StateTriple(0.2, 0.5, 0.3))],
        [(C, StateTriple(0.1, 0.5, 0.4)), (D, StateTriple(0.3, 0.3, 0.4))],
        [(A, StateTriple(0.4, 0.4, 0.2)), (D, StateTriple(0.25, 0.25, 0.5))],
    ]


def test_refine_zero_rounds_is_identity():
    model = four_state_model()
    frames = frame_estimates()
    out = refine_across_frames(frames, model.transitions, rounds=0)
    assert out == frames
    with pytest.raises(ValueError):
        refine_across_frames(frames, model.transitions, rounds=-1)


def test_refine_triples_stay_valid():
    model = four_state_model()
    out = refine_across_frames(frame_estimates(), model.transitions, rounds=3)
    for frame in out:
        for _, triple in frame:
            triple.check()


def test_refine_other_mass_never_increases():
    model = four_state_model()
    frames = frame_estimates()
    totals = []
    for rounds in range(4):
        out = refine_across_frames(frames, model.transitions, rounds=rounds)
        totals.append(sum(t.p_other for frame in out for _, t in frame))
    for before, after in zip(totals, totals[1:]):
        assert after <= before + 1e-12


def test_refine_floor_zeroes_small_other_mass():
    model = four_state_model()
    frames = [[(A, StateTriple(0.48, 0.47, 0.05))]]
    (out,) = refine_across_frames(frames, model.transitions, rounds=1)
    state, triple = out[0]
    assert state == A
    assert triple.p_other == 0.0
    triple.check()
    # the reassignment kept the ant/entity ratio
    assert triple.p_ant / triple.p_entity == pytest.approx(0.48 / 0.47)


def refine_oracle(frames, transitions, rounds, floor=0.1):
    cur = [list(frame) for frame in frames]
    for _ in range(rounds):
        nxt = []
        for f, frame in enumerate(cur):
            out = []
            for state, triple in frame:
                ws = [1.0]
                ts = [list(triple)]
                if f + 1 < len(cur):
                    ahead = dict(cur[f + 1])
                    for succ, p in transitions.row(state).items():
                        if p > 0 and succ in ahead:
                            ws.append(p)
                            ts.append(list(ahead[succ]))
                if f > 0:
                    for prev_state, prev_triple in cur[f - 1]:
                        p = transitions.row(prev_state).get(state, 0.0)
                        if p > 0:
                            ws.append(p)
                            ts.append(list(prev_triple))
                total = sum(ws)
                avg = [sum(w * t[i] for w, t in zip(ws, ts)) / total for i in range(3)]
                cap = min(avg[2], triple.p_other)
                if cap < floor:
                    cap = 0.0
                excess = avg[2] - cap
                a, e = avg[0], avg[1]
                if excess > 0:
                    base = a + e
                    if base > 0:
                        a += excess * a / base
                        e += excess * e / base
                    else:
                        a += excess / 2
                        e += excess / 2
                out.append((state, StateTriple(a, e, cap)))
            nxt.append(out)
        cur = nxt
    return cur


def test_refine_matches_hand_rolled_oracle():
    model = four_state_model()
    frames = frame_estimates()
    got = refine_across_frames(frames, model.transitions, rounds=2)
    want = refine_oracle(frames, model.transitions, rounds=2)
    for g_frame, w_frame in zip(got, want):
        for (gs, gt), (ws_, wt) in zip(g_frame, w_frame):
            assert gs == ws_
            for a, b in zip(gt, wt):
                assert abs(a - b) <= 1e-12


def test_zone_observations_cover_larva_discs_only():
    transitions = TransitionModel(width=10, height=10)
    larva = Zone(0, [(5, 5)], (5, 5), label="larva")
    decoy = Zone(1, [(2, 2)], (2, 2), label="ant")
    model = trained(transitions, zones=[larva, decoy], influence_radius=2.0)
    obs = zone_observations(model)
    # 13 cells within Euclidean 2 of (5,5), 9 moves each
    assert len(obs) == 13 * 9
    assert all(o.category == "entity" for o in obs)
    cells = {o.state.cell for o in obs}
    assert (5, 5) in cells and (7, 5) in cells
    assert (2, 2) not in cells
    assert (8, 5) not in cells


def test_zone_observations_clip_at_arena_edge():
    transitions = TransitionModel(width=10, height=10)
    corner = Zone(0, [(0, 0)], (0, 0), label="larva")
    model = trained(transitions, zones=[corner], influence_radius=2.0)
    obs = zone_observations(model)
    assert len(obs) == 6 * 9
    assert all(o.state.x >= 0 and o.state.y >= 0 for o in obs)


def test_best_matching_state_prefers_near_frequent_and_early_moves():
    transitions = TransitionModel(width=10, height=10)
    s_common = MovementState(2, 3, "E")
    s_rare = MovementState(4, 3, "N")
    model = trained(
        transitions,
        observations=[Observation(s_common, "ant")] * 2 + [Observation(s_rare, "ant")],
    )
    assert best_matching_state((2, 3), model) == s_common
    # equidistant: frequency breaks the tie
    assert best_matching_state((3, 3), model) == s_common
    # frequency tied too: canonical move order decides (N before E)
    tied = trained(
        transitions,
        observations=[Observation(s_common, "ant"), Observation(s_rare, "ant")],
    )
    assert best_matching_state((3, 3), tied) == s_rare


def test_best_matching_state_falls_back_to_stay():
    transitions = TransitionModel(width=10, height=10)
    model = trained(transitions, observations=[Observation(MovementState(0, 0, "E"), "ant")])
    assert best_matching_state((9, 9), model) == MovementState(9, 9, "stay")
    empty = trained(transitions)
    assert best_matching_state((4, 4), empty) == MovementState(4, 4, "stay")


def test_live_predict_depth_zero_and_validation():
    a, _, _, model = chain_model()
    model.observations.append(Observation(a, "ant"))
    prediction = live_predict(a.cell, 7, model, depth_limit=0)
    assert prediction.frame_index == 7
    assert len(prediction.future_states) == 1
    first = prediction.future_states[0]
    assert (first.x, first.y, first.p) == (a.x, a.y, 1.0)
    with pytest.raises(ValueError):
        live_predict((50, 50), 0, model)
    with pytest.raises(UntrainedModelError):
        live_predict((3, 3), 0, ColonyModel(transitions=model.transitions))


def test_live_predict_flattens_the_walk_tree():
    a, b, c, model = chain_model()
    model.observations.append(Observation(a, "ant"))
    prediction = live_predict(a.cell, 0, model, depth_limit=4, threshold=0.5)
    cells = [(s.x, s.y) for s in prediction.future_states]
    assert cells == [a.cell, b.cell, c.cell]
    assert all(s.tag in ("ant", "entity", "other") for s in prediction.future_states)
