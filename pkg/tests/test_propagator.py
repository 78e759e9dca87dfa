import math

import numpy as np
import pytest

from cavityfall import (
    AbsorbingLayer,
    CavitySpec,
    DomainError,
    GravityProfile,
    Grid1D,
    PropagationScenario,
    ValidationError,
    WaveState,
    analytic_gaussian_oracle,
    effective_mass,
    exact_accelerating_gaussian,
    init_gaussian,
    observables,
    phase_gradient,
    propagate,
    step,
)
from cavityfall.units import hbar as hbar_si

GRID = Grid1D(-32.0, 32.0, 1024)


def l2_distance(u, v, dy):
    return math.sqrt(float(np.sum(np.abs(u - v) ** 2)) * dy)


class TestGrid1D:
    def test_spacing_and_axes(self):
        assert GRID.dy == 64.0 / 1024
        y = GRID.y_values()
        assert y[0] == -32.0
        assert len(y) == 1024
        k = GRID.k_values()
        assert k[0] == 0.0
        assert np.max(k) == pytest.approx(math.pi / GRID.dy, rel=1e-2)

    @pytest.mark.parametrize("n", [32, 100, 1023])
    def test_rejects_bad_point_counts(self, n):
        with pytest.raises(ValidationError):
            Grid1D(-1.0, 1.0, n)

    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValidationError):
            Grid1D(1.0, -1.0, 128)


class TestScenarioValidation:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValidationError):
            PropagationScenario(mass=0.0, g_tilde=1.0, dt=0.1, t_final=1.0)
        with pytest.raises(ValidationError):
            PropagationScenario(mass=1.0, g_tilde=-1.0, dt=0.1, t_final=1.0)
        with pytest.raises(ValidationError):
            PropagationScenario(mass=1.0, g_tilde=1.0, dt=0.0, t_final=1.0)
        with pytest.raises(ValidationError):
            PropagationScenario(mass=1.0, g_tilde=1.0, dt=0.5, t_final=0.25)
        with pytest.raises(ValidationError):
            PropagationScenario(mass=1.0, g_tilde=1.0, dt=0.1, t_final=1.0, record_stride=0)

    def test_absorber_width_bounded_by_domain(self):
        wide = PropagationScenario(
            mass=1.0, g_tilde=0.0, dt=0.1, t_final=1.0, boundary=AbsorbingLayer(width=20.0, strength=1.0)
        )
        with pytest.raises(ValidationError, match="quarter"):
            step(init_gaussian(GRID, 1.0), wide)


class TestInitGaussian:
    def test_zero_momentum_profile_is_real(self):
        state = init_gaussian(GRID, sigma0=1.0)
        assert np.all(state.amplitudes.imag == 0.0)
        assert np.all(state.amplitudes.real > 0.0)
        assert abs(observables(state).mean_k) < 1e-10

    def test_measured_moments(self):
        # 8 sigma of edge clearance: wrapped tails are then below the 1e-6
        # width contract (at 5 sigma they already bias the variance by ~7e-6)
        state = init_gaussian(GRID, sigma0=4.0, y_center=0.0)
        rec = observables(state)
        assert rec.norm == pytest.approx(1.0, rel=1e-14)
        assert rec.centroid == pytest.approx(0.0, abs=1e-12)
        assert rec.width == pytest.approx(4.0, rel=1e-6)

    def test_spectral_moment_recovers_k0(self):
        k0 = 16.0 * 2.0 * math.pi / 64.0  # lattice wavenumber
        state = init_gaussian(GRID, sigma0=1.0, k0=k0)
        rec = observables(state)
        assert rec.mean_k == pytest.approx(k0, rel=1e-8)

    def test_unresolved_gaussian_rejected(self):
        with pytest.raises(DomainError, match="unresolved"):
            init_gaussian(GRID, sigma0=3.9 * GRID.dy)

    def test_oversized_gaussian_rejected(self):
        with pytest.raises(DomainError, match="oversized"):
            init_gaussian(GRID, sigma0=17.0)


class TestObservables:
    def test_lattice_phase_shifts_mean_k_exactly(self):
        q = 8.0 * 2.0 * math.pi / 64.0
        state = init_gaussian(GRID, sigma0=1.0)
        rec0 = observables(state)
        shifted = WaveState(GRID, state.amplitudes * np.exp(1j * q * GRID.y_values()), 0.0)
        rec1 = observables(shifted)
        assert rec1.mean_k - rec0.mean_k == pytest.approx(q, rel=1e-12)

    def test_zero_norm_rejected(self):
        dead = WaveState(GRID, np.zeros(1024, dtype=complex), 0.0)
        with pytest.raises(DomainError, match="norm"):
            observables(dead)

    def test_energy_is_conserved_along_a_run(self):
        scenario = PropagationScenario(mass=1.0, g_tilde=0.5, dt=1 / 64, t_final=2.0, record_stride=16)
        _, trace = propagate(init_gaussian(GRID, 1.0), scenario)
        drift = np.max(np.abs(trace.energy - trace.energy[0]) / abs(trace.energy[0]))
        assert drift < 1e-10


class TestStep:
    def test_free_step_preserves_norm_and_centroid(self):
        scenario = PropagationScenario(mass=1.0, g_tilde=0.0, dt=0.05, t_final=0.05)
        state = init_gaussian(GRID, 1.0)
        after = step(state, scenario)
        rec = observables(after)
        assert after.t == 0.05
        assert rec.norm == pytest.approx(1.0, abs=1e-14)
        assert rec.centroid == pytest.approx(0.0, abs=1e-12)

    def test_single_step_impulse(self):
        # a linear potential transfers exactly -m*g_tilde*dt of momentum;
        # Strang splitting reproduces it to roundoff (splitting errors are
        # global phases for linear potentials)
        mass, g_tilde, dt = 2.0, 1.5, 0.02
        scenario = PropagationScenario(mass=mass, g_tilde=g_tilde, dt=dt, t_final=dt)
        after = step(init_gaussian(GRID, 1.0), scenario)
        rec = observables(after, mass, g_tilde)
        assert rec.mean_k == pytest.approx(-mass * g_tilde * dt, abs=1e-12)

    def test_two_half_steps_match_one_full_step_to_third_order(self):
        # Richardson pair: the deviation is a pure phase ~ m*g_tilde^2*dt^3,
        # so halving dt must shrink it by 8
        state = init_gaussian(GRID, 1.0)
        deviations = []
        for dt in (0.25, 0.125):
            full = step(state, PropagationScenario(mass=1.0, g_tilde=4.0, dt=dt, t_final=dt))
            half_scn = PropagationScenario(mass=1.0, g_tilde=4.0, dt=dt / 2, t_final=dt / 2)
            halves = step(step(state, half_scn), half_scn)
            deviations.append(l2_distance(full.amplitudes, halves.amplitudes, GRID.dy))
        ratio = deviations[0] / deviations[1]
        assert deviations[0] < 0.25**3
        assert ratio == pytest.approx(8.0, rel=0.05)

    def test_non_finite_amplitudes_raise(self):
        state = init_gaussian(GRID, 1.0)
        state.amplitudes[100] = np.nan
        with pytest.raises(DomainError, match="non-finite"):
            step(state, PropagationScenario(mass=1.0, g_tilde=1.0, dt=0.1, t_final=0.1))


class TestPropagate:
    def test_free_packet_spreads_on_schedule(self):
        scenario = PropagationScenario(mass=1.0, g_tilde=0.0, dt=1 / 64, t_final=4.0, record_stride=32)
        _, trace = propagate(init_gaussian(GRID, 1.0), scenario)
        assert np.max(np.abs(trace.centroid)) < 1e-12
        expected = np.sqrt(1.0 + (trace.t / 2.0) ** 2)
        assert np.max(np.abs(trace.width - expected) / expected) < 1e-6

    def test_centroid_falls_on_the_parabola(self):
        scenario = PropagationScenario(mass=1.0, g_tilde=1.0, dt=1 / 64, t_final=4.0, record_stride=16)
        _, trace = propagate(init_gaussian(GRID, 1.0), scenario)
        final_drop = 0.5 * 1.0 * 4.0**2
        assert np.max(np.abs(trace.centroid + 0.5 * trace.t**2)) < 1e-8 * final_drop

    def test_centroid_trace_is_mass_independent(self):
        traces = []
        for mass in (1.0, 10.0):
            scenario = PropagationScenario(mass=mass, g_tilde=1.0, dt=1 / 64, t_final=2.0, record_stride=16)
            _, trace = propagate(init_gaussian(GRID, 1.0), scenario)
            traces.append(trace.centroid)
        assert np.max(np.abs(traces[0] - traces[1])) < 1e-10 * 2.0

    def test_records_include_final_partial_stride(self):
        scenario = PropagationScenario(mass=1.0, g_tilde=0.0, dt=0.1, t_final=1.0, record_stride=3)
        _, trace = propagate(init_gaussian(GRID, 1.0), scenario)
        assert trace.t[0] == 0.0
        assert trace.t[-1] == pytest.approx(1.0, rel=1e-15)
        assert np.all(np.diff(trace.t) > 0)

    def test_domain_escape_suggests_larger_grid(self):
        small = Grid1D(-8.0, 8.0, 128)
        scenario = PropagationScenario(mass=1.0, g_tilde=2.0, dt=1 / 32, t_final=4.0, record_stride=4)
        with pytest.raises(DomainError, match="enlarge the grid"):
            propagate(init_gaussian(small, 1.0), scenario)

    def test_non_finite_initial_state_rejected(self):
        state = init_gaussian(GRID, 1.0)
        state.amplitudes[0] = np.inf
        with pytest.raises(DomainError):
            propagate(state, PropagationScenario(mass=1.0, g_tilde=1.0, dt=0.1, t_final=0.5))

    def test_absorbing_layer_removes_norm_monotonically(self):
        # launch the packet into the absorber; norm must only decrease
        layer = AbsorbingLayer(width=8.0, strength=4.0)
        scenario = PropagationScenario(
            mass=1.0, g_tilde=0.0, dt=1 / 32, t_final=6.0, record_stride=16, boundary=layer
        )
        state = init_gaussian(GRID, 1.0, y_center=0.0, k0=8.0 * 2.0 * math.pi / 64.0 * 8)
        _, trace = propagate(state, scenario)
        assert trace.norm[-1] < 0.5
        assert np.all(np.diff(trace.norm) <= 1e-12)


class TestAnalyticOracle:
    def test_release_point(self):
        m = analytic_gaussian_oracle(1.0, 1.0, 1.0, 0.0)
        assert m == (0.0, 1.0, 0.0, 0.0)

    def test_characteristic_spreading_time(self):
        # hbar*t/(2*m*sigma0^2) = 1 doubles the variance
        sigma0, mass = 0.7, 3.0
        t = 2.0 * mass * sigma0**2
        m = analytic_gaussian_oracle(sigma0, mass, 0.0, t)
        assert m.width == pytest.approx(sigma0 * math.sqrt(2.0), rel=1e-15)

    def test_si_phase_gradient_matches_lab_frame_law(self):
        # m_s*g_tilde*t/hbar with the dielectric mass and renormalized
        # acceleration equals omega0*g*t/c^2 exactly
        cav = CavitySpec.from_rest_wavelength(1.064e-6, n_s=1.43)
        profile = GravityProfile(g=9.81, n_s=1.43)
        t = 0.37
        m = analytic_gaussian_oracle(0.1, effective_mass(cav), profile.g_tilde, t, hbar=hbar_si)
        assert m.phase_gradient == pytest.approx(phase_gradient(cav.omega0, profile, t), rel=1e-12)
        assert m.mean_k == pytest.approx(-m.phase_gradient, rel=1e-15)

    def test_negative_time_rejected(self):
        with pytest.raises(ValidationError):
            analytic_gaussian_oracle(1.0, 1.0, 1.0, -0.1)


class TestOracleEquivalence:
    def test_observables_match_closed_form(self):
        mass, g_tilde = 1.0, 1.0
        scenario = PropagationScenario(mass=mass, g_tilde=g_tilde, dt=1 / 64, t_final=3.0, record_stride=16)
        _, trace = propagate(init_gaussian(GRID, 1.0), scenario)
        final_drop = 0.5 * g_tilde * 3.0**2
        for i, t in enumerate(trace.t):
            m = analytic_gaussian_oracle(1.0, mass, g_tilde, float(t))
            assert abs(trace.centroid[i] - m.centroid) < 1e-6 * final_drop
            assert trace.width[i] == pytest.approx(m.width, rel=1e-6)
            assert abs(trace.mean_k[i] - m.mean_k) < 1e-6 * mass * g_tilde * 3.0
            if t > 0:
                assert abs(trace.phase_gradient[i]) == pytest.approx(m.phase_gradient, rel=1e-6)

    def test_second_order_convergence_of_the_full_state(self):
        # against the closed-form accelerated Gaussian (global phase included);
        # for a linear potential the only splitting error is that phase, with
        # magnitude m*g_tilde^2*t_final*dt^2/24
        mass, g_tilde, t_final = 1.0, 1.0, 2.0
        errors = []
        dts = [1 / 8, 1 / 16, 1 / 32, 1 / 64]
        exact = exact_accelerating_gaussian(GRID, 1.0, mass, g_tilde, t_final)
        for dt in dts:
            scenario = PropagationScenario(mass=mass, g_tilde=g_tilde, dt=dt, t_final=t_final, record_stride=10**9)
            final, _ = propagate(init_gaussian(GRID, 1.0), scenario)
            errors.append(l2_distance(final.amplitudes, exact, GRID.dy))
        errors = np.array(errors)
        ratios = errors[:-1] / errors[1:]
        assert np.all(np.abs(ratios - 4.0) < 0.2)
        slope = np.polyfit(np.log(dts), np.log(errors), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.05)
        predicted = mass * g_tilde**2 * t_final * np.array(dts) ** 2 / 24.0
        assert np.max(np.abs(errors / predicted - 1.0)) < 0.05

    def test_phase_gradient_law_in_scaled_units(self):
        mass, g_tilde = 2.0449, 0.4
        scenario = PropagationScenario(mass=mass, g_tilde=g_tilde, dt=1 / 64, t_final=2.0, record_stride=16)
        _, trace = propagate(init_gaussian(GRID, 1.0), scenario)
        for i, t in enumerate(trace.t[1:], start=1):
            assert abs(trace.phase_gradient[i]) == pytest.approx(mass * g_tilde * t, rel=1e-4)

    def test_dielectric_drag_ratio(self):
        ns_squared = 1.43**2
        traces = {}
        for label, g_tilde in (("vacuum", 1.0), ("dielectric", 1.0 / ns_squared)):
            scenario = PropagationScenario(mass=1.0, g_tilde=g_tilde, dt=1 / 64, t_final=1.5, record_stride=16)
            _, traces[label] = propagate(init_gaussian(GRID, 1.0), scenario)
        ratio = traces["vacuum"].centroid[1:] / traces["dielectric"].centroid[1:]
        assert np.max(np.abs(ratio - ns_squared) / ns_squared) < 1e-8


class TestConservation:
    def test_norm_is_conserved_to_roundoff(self):
        scenario = PropagationScenario(mass=1.0, g_tilde=0.5, dt=1 / 128, t_final=6.0, record_stride=64)
        _, trace = propagate(init_gaussian(GRID, 1.0), scenario)
        assert np.max(np.abs(trace.norm - trace.norm[0])) < 1e-12
