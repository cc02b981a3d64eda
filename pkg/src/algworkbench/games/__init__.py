"""Networks, the games G, F(m) and H, solvers, certificates and scripted plays."""
from .hyper import (Hypernetwork, HyperResult, HyperSolver, hyper_violations, hyperedge_classify,
                    initial_hypernetwork, sim_classes, solve_hypergame, transform)
from .hyper_replay import replay_hyper_certificate
from .instances import delete_orbits, instance_pool, seeded_instances, triangle_frame
from .naive import ReplayError, naive_outcome, replay_certificate
from .network import Extender, Network, canonical_key, is_network, network_violations
from .rainbow_game import (ConeGameResult, RainbowStrategy, RhoMap, exists_rainbow_strategy, exists_replies,
                           forall_cone_move, opening_graph, solve_cone_game)
from .scripted import (AmalgMove, AtomMove, CylMove, GameState, RainbowTranscript, TransformMove, Transcript,
                       check_move, check_reply, legal_moves, run_rainbow_script, run_scripted,
                       solver_exists_strategy, solver_forall_script)
from .solver import GameResult, GameSolver, dumps_certificate, normal_move, solve_game
