"""Compiled per-sample simulation loop.

This mirrors network.run_sample step for step (same ordering, stamps and
clamps) but runs through numba, which is what makes 25-epoch training runs
take seconds instead of minutes. tests/test_network.py checks the two paths
against each other on full samples.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

NEVER = -1.0e18


@njit(cache=True)
def run_sample_kernel(
    g_learn,            # (m, n) uS, mutated in place
    g_rec,              # (m, n) uS, mutated in place on immediate transfers
    input_currents,     # (m,) nA, constant over the presentation
    teacher_currents,   # (n,) nA
    n_steps,
    dt,
    # neuron
    tau_m, r_mohm, v_threshold, v_reset, t_ref,
    # alpha kernel
    alpha_v0, alpha_tau1, alpha_tau2,
    # read path
    read_gain,
    # waveforms
    wf_width, wf_height, pre_tail_amp, pre_tail_tau, post_tail_amp, post_tail_tau,
    # device
    g_min, g_max, v_pos, v_neg_low, v_neg_high, rate_pos, rate_neg, realistic,
    # reference STDP
    a_plus, a_minus, tau_plus, tau_minus,
    # control
    reference_mode, learn_enabled, immediate_transfer,
):
    m = g_learn.shape[0]
    n = g_learn.shape[1]
    g_range = g_max - g_min

    v_in = np.full(m, v_reset)
    v_out = np.full(n, v_reset)
    ref_in = np.zeros(m)
    ref_out = np.zeros(n)
    s1 = np.zeros(m)
    s2 = np.zeros(m)
    last_pre = np.full(m, NEVER)
    last_post = np.full(n, NEVER)
    latest_spike = NEVER

    d1 = math.exp(-dt / alpha_tau1)
    d2 = math.exp(-dt / alpha_tau2)

    counts = np.zeros(n, dtype=np.int64)
    cap = (n_steps + 1) * (m + n)
    spike_times = np.empty(cap)
    spike_ids = np.empty(cap, dtype=np.int64)
    n_events = 0

    spiked_in = np.zeros(m, dtype=np.bool_)
    spiked_out = np.zeros(n, dtype=np.bool_)

    for k in range(n_steps):
        now = k * dt

        # --- recognize path, everything evaluated at `now` ---
        for j in range(n):
            i_col = 0.0
            for i in range(m):
                i_col += g_rec[i, j] * alpha_v0 * (s1[i] - s2[i])
            i_drive = read_gain * i_col + teacher_currents[j]
            if now < ref_out[j]:
                v_out[j] = v_reset
                spiked_out[j] = False
            else:
                v = v_out[j] + (dt / tau_m) * (i_drive * r_mohm * 1e-3 - v_out[j])
                if v >= v_threshold:
                    v_out[j] = v_reset
                    ref_out[j] = now + t_ref
                    spiked_out[j] = True
                    counts[j] += 1
                else:
                    v_out[j] = v
                    spiked_out[j] = False

        for i in range(m):
            if now < ref_in[i]:
                v_in[i] = v_reset
                spiked_in[i] = False
            else:
                v = v_in[i] + (dt / tau_m) * (input_currents[i] * r_mohm * 1e-3 - v_in[i])
                if v >= v_threshold:
                    v_in[i] = v_reset
                    ref_in[i] = now + t_ref
                    spiked_in[i] = True
                else:
                    v_in[i] = v
                    spiked_in[i] = False

        for i in range(m):
            if spiked_in[i]:
                spike_times[n_events] = now
                spike_ids[n_events] = i
                n_events += 1
        for j in range(n):
            if spiked_out[j]:
                spike_times[n_events] = now
                spike_ids[n_events] = m + j
                n_events += 1

        # --- learn path ---
        if learn_enabled:
            if reference_mode:
                # depression first: pre spikes pair with strictly earlier posts
                for i in range(m):
                    if spiked_in[i]:
                        for j in range(n):
                            if last_post[j] > NEVER / 2:
                                dw = -a_minus * math.exp(-(now - last_post[j]) / tau_minus)
                                gv = g_learn[i, j] + dw * g_range
                                g_learn[i, j] = min(g_max, max(g_min, gv))
                        last_pre[i] = now
                for j in range(n):
                    if spiked_out[j]:
                        for i in range(m):
                            if last_pre[i] > NEVER / 2:
                                dw = a_plus * math.exp(-(now - last_pre[i]) / tau_plus)
                                gv = g_learn[i, j] + dw * g_range
                                g_learn[i, j] = min(g_max, max(g_min, gv))
                        last_post[j] = now
            else:
                for i in range(m):
                    if spiked_in[i]:
                        last_pre[i] = now
                        latest_spike = now
                for j in range(n):
                    if spiked_out[j]:
                        last_post[j] = now
                        latest_spike = now
                # over-threshold voltage needs one side in plateau
                if now - latest_spike < wf_width:
                    for i in range(m):
                        age = now - last_pre[i]
                        if age < 0.0 or last_pre[i] <= NEVER / 2:
                            w_pre = 0.0
                        elif age < wf_width:
                            w_pre = wf_height
                        else:
                            w_pre = -pre_tail_amp * math.exp(-(age - wf_width) / pre_tail_tau)
                        for j in range(n):
                            age_q = now - last_post[j]
                            if age_q < 0.0 or last_post[j] <= NEVER / 2:
                                w_post = 0.0
                            elif age_q < wf_width:
                                w_post = wf_height
                            else:
                                w_post = -post_tail_amp * math.exp(-(age_q - wf_width) / post_tail_tau)
                            v_dev = w_post - w_pre
                            g = g_learn[i, j]
                            if realistic:
                                frac_top = (g_max - g) / g_range
                                v_neg = v_neg_low + (v_neg_high - v_neg_low) * frac_top
                                if v_dev > v_pos:
                                    g += rate_pos * (v_dev - v_pos) * dt * frac_top
                                elif v_dev < -v_neg:
                                    g -= rate_neg * (-v_dev - v_neg) * dt * (g - g_min) / g_range
                            else:
                                if v_dev > v_pos:
                                    g += rate_pos * (v_dev - v_pos) * dt
                                elif v_dev < -v_pos:
                                    g -= rate_neg * (-v_dev - v_pos) * dt
                            g_learn[i, j] = min(g_max, max(g_min, g))

            if immediate_transfer:
                for i in range(m):
                    for j in range(n):
                        g_rec[i, j] = g_learn[i, j]

        # --- advance alpha sums to the next step ---
        for i in range(m):
            if spiked_in[i]:
                s1[i] += 1.0
                s2[i] += 1.0
            s1[i] *= d1
            s2[i] *= d2

    return counts, spike_times[:n_events], spike_ids[:n_events]


@njit(cache=True)
def lif_spike_times_kernel(currents, tau_m, r_mohm, v_threshold, v_reset, t_ref, dt):
    """Spike times of one LIF neuron driven by a per-step current array."""
    n_steps = currents.shape[0]
    v = v_reset
    ref_until = 0.0
    out = np.empty(n_steps)
    n_spikes = 0
    for k in range(n_steps):
        now = k * dt
        if now < ref_until:
            v = v_reset
            continue
        v += (dt / tau_m) * (currents[k] * r_mohm * 1e-3 - v)
        if v >= v_threshold:
            v = v_reset
            ref_until = now + t_ref
            out[n_spikes] = now
            n_spikes += 1
    return out[:n_spikes]
