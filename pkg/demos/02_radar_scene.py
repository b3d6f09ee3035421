"""Tour of the radar/jammer coexistence scene.

Shows the state/action enumeration, the SINR surface, the per-task reward
trade-offs, a sampled episode, and how the three task experts behave
differently in the same situations.
"""

import numpy as np

import radar_irl as ri
from radar_irl import radar_env as env

cfg = env.default_scenario()
print(f"desk scene: {cfg.n_states} states "
      f"({cfg.n_pos_bins} pos x {cfg.n_vel_bins} vel x {cfg.n_occupancy_words} occupancy), "
      f"{cfg.n_actions} actions")

actions = env.enumerate_actions(cfg)
print("first actions:", [(a.band_lo, a.band_hi, a.power_level) for a in actions[:6]])

print("\nSINR vs range (max power, clear band vs jammed band):")
for pos in range(cfg.n_pos_bins):
    clear = env.sinr_db(cfg, env.EnvState(pos, 0, 0b000), env.RadarAction(0, 0, 3))
    jammed = env.sinr_db(cfg, env.EnvState(pos, 0, 0b001), env.RadarAction(0, 0, 3))
    print(f"  bin {pos}: clear {clear:7.2f} dB   jammed {jammed:7.2f} dB")

state = env.EnvState(pos_bin=2, vel_bin=1, occupancy=0b010)
print(f"\nrewards for transmitting into occupancy {state.occupancy:03b} "
      "(channel 1 jammed), by task:")
print(f"{'action':>18} {'search':>8} {'lpi':>8} {'share':>8}")
for a in (env.RadarAction(0, 0, 3), env.RadarAction(1, 1, 3),
          env.RadarAction(0, 2, 3), env.RadarAction(0, 0, 0)):
    row = [env.reward(cfg, cfg.task(t), state, a, state) for t in (1, 2, 3)]
    label = f"band {a.band_lo}-{a.band_hi} pow {a.power_level}"
    print(f"{label:>18} {row[0]:8.3f} {row[1]:8.3f} {row[2]:8.3f}")

print("\none simulated episode (jammer wanders, target drifts):")
rng = np.random.default_rng(3)
s = env.EnvState(pos_bin=1, vel_bin=2, occupancy=0b001)
for t in range(8):
    print(f"  t={t}: pos={s.pos_bin} vel={s.vel_bin} occupancy={s.occupancy:03b}")
    s = env.step(cfg, s, env.RadarAction(0, 0, 0), rng)

print("\nexpert disagreement across tasks (greedy action per sample state):")
mdp = env.build_mdp(cfg, 0.9)
policies = {t: env.expert_policy(cfg, cfg.task(t), 0.9) for t in (1, 2, 3)}
states, _ = env.enumerate_states(cfg)
for idx in (9, 41, 77):
    st = states[idx]
    picks = {t: actions[int(policies[t][idx].argmax())] for t in (1, 2, 3)}
    desc = {t: f"band {a.band_lo}-{a.band_hi}/pow {a.power_level}" for t, a in picks.items()}
    print(f"  state pos={st.pos_bin} vel={st.vel_bin} occ={st.occupancy:03b}: {desc}")
