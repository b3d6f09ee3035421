"""Tabular MDP dynamic programming on a tiny random world.

Builds a 6-state / 3-action MDP, solves it with hard value iteration,
contrasts the greedy policy with Boltzmann policies at different
temperatures, and checks the Bellman residual.
"""

import numpy as np

import radar_irl as ri

rng = np.random.default_rng(0)
n_states, n_actions = 6, 3
transition = rng.random((n_states, n_actions, n_states)) + 0.1
transition /= transition.sum(axis=2, keepdims=True)
mdp = ri.TabularMdp(n_states=n_states, n_actions=n_actions, transition=transition,
                    discount=0.9, horizon=15)
reward = rng.standard_normal((n_states, n_actions, n_states))

v, q, greedy = ri.value_iteration(mdp, reward, tol=1e-9)
print("optimal V:", np.round(v, 4))
print("greedy actions:", q.argmax(axis=1))

backup = np.einsum("saz,saz->sa", mdp.transition, reward) + mdp.discount * (mdp.transition @ v)
print("Bellman residual:", float(np.abs(v - backup.max(axis=1)).max()))

print("\nsoftening the argmax:")
for beta in (0.0, 1.0, 5.0, 50.0):
    q_soft, policy = ri.soft_value_iteration(mdp, reward, beta=beta, n_sweeps=50)
    match = (q_soft.argmax(axis=1) == greedy.argmax(axis=1)).mean()
    entropy = float(-(policy * np.log(policy)).sum(axis=1).mean())
    print(f"  beta={beta:5.1f}  mean policy entropy={entropy:.3f}  "
          f"argmax agreement with greedy={match:.2f}")

start = np.full(n_states, 1.0 / n_states)
print("\nfinite-horizon returns from a uniform start:")
print("  greedy :", round(ri.policy_value(mdp, reward, greedy, start), 4))
print("  uniform:", round(ri.policy_value(mdp, reward, ri.uniform_policy(mdp), start), 4))
