import numpy as np
import pytest

from gaugecavity.bogoliubov import coupling_g, diagonalize_block
from gaugecavity.criterion import (
    coulomb_specialized,
    dipole_specialized,
    displaced_energy,
    evaluate,
    order_parameter,
    order_parameter_from_vector,
    stiffness_energy,
)
from gaugecavity.errors import ArgumentError
from gaugecavity.gauge import (
    coupling_f,
    diamagnetic_D,
    gauge_spectrum,
    lwl_mode,
    make_gauge,
    ring_mode,
)
from gaugecavity.matter import (
    build_anharmonic_dipole,
    build_ring_lattice,
    build_two_level_ensemble,
    matter_spectrum,
)


def two_level(n=6, d=0.2, w0=1.0, v=1.0):
    return build_two_level_ensemble(n, w0, (0.0, d, 0.0), v)


class TestEvaluate:
    def test_dipole_below_threshold(self):
        n, d, v, w0 = 6, 0.2, 1.0, 1.0
        assert 2 * n * d * d / (v * w0) < 1
        reps = evaluate(two_level(n, d, w0, v), make_gauge("dipole"),
                        lwl_mode(1.0, v))
        assert all(not r.condensed for r in reps)
        assert all(r.rhs == 1.0 for r in reps)
        plus = reps[0]
        assert plus.lhs == pytest.approx(2 * n * d * d / (v * w0), rel=1e-12)

    def test_dipole_above_threshold(self):
        n, d, v = 6, 0.5, 1.0
        reps = evaluate(two_level(n, d), make_gauge("dipole"), lwl_mode(1.0, v))
        assert reps[0].condensed and not reps[1].condensed

    @pytest.mark.parametrize("builder", [
        lambda: two_level(8, 0.9),
        lambda: build_anharmonic_dipole(40, 1.0, 1.0, 0.0, 0.9, 1.0),
    ])
    def test_coulomb_lwl_never_condenses(self, builder):
        model = builder()
        reps = evaluate(model, make_gauge("coulomb"), lwl_mode(1.0, 1.0))
        for r in reps:
            assert not r.condensed
            assert r.rhs >= 1.0
        # sum-rule cancellation: margin of the coupled branch is exactly -1
        assert reps[0].margin == pytest.approx(-1.0, abs=1e-10)

    def test_zero_coupling(self):
        model = build_two_level_ensemble(3, 1.0, (0, 0, 0), 1.0)
        for preset in ("coulomb", "dipole"):
            reps = evaluate(model, make_gauge(preset), lwl_mode(1.0, 1.0))
            assert all(r.lhs == 0.0 and not r.condensed for r in reps)

    def test_part_structure(self):
        model = two_level(5, 0.3)
        mode = lwl_mode(1.0, 1.0)
        for r in evaluate(model, make_gauge("coulomb"), mode):
            assert r.electric_part == 0.0
            assert r.lhs == r.electric_part + r.magnetic_part
        for r in evaluate(model, make_gauge("dipole"), mode):
            assert r.magnetic_part == 0.0
            assert r.lhs == r.electric_part + r.magnetic_part

    def test_volume_mismatch_guard(self):
        with pytest.raises(ArgumentError):
            evaluate(two_level(3, 0.2, v=2.0), make_gauge("dipole"),
                     lwl_mode(1.0, 1.0))


class TestSpecializedForms:
    def test_coulomb_equivalence_on_ring(self):
        model = build_ring_lattice(6, 1.0, 1.0)
        gauge = make_gauge("coulomb", lwl=False)
        mode = ring_mode(model, 1)
        rep = coulomb_specialized(model, gauge, mode)
        assert rep.cross_check_residual <= 1e-10
        assert not rep.condensed

    def test_coulomb_lwl_lhs_vanishes(self):
        model = build_anharmonic_dipole(40, 1.0, 1.0, 0.0, 0.8, 1.0)
        rep = coulomb_specialized(model, make_gauge("coulomb"), lwl_mode(1.0, 1.0))
        assert abs(rep.lhs) <= 1e-10
        assert rep.rhs == 1.0 and not rep.condensed

    def test_coulomb_zero_coupling(self):
        model = build_two_level_ensemble(3, 1.0, (0, 0, 0), 1.0)
        rep = coulomb_specialized(model, make_gauge("coulomb"), lwl_mode(1.0, 1.0))
        assert rep.lhs == pytest.approx(0.0, abs=1e-15)

    def test_dipole_threshold_formula(self):
        n, w0, v = 6, 1.0, 1.0
        for d in (0.2, 0.33):
            rep = dipole_specialized(two_level(n, d, w0, v), make_gauge("dipole"),
                                     lwl_mode(1.0, v))
            assert rep.lhs == pytest.approx(2 * n * d * d / (v * w0), rel=1e-12)
            assert rep.condensed == (2 * n * d * d / (v * w0) > 1)
            assert rep.cross_check_residual <= 1e-10

    def test_dipole_polarizability_identity_harmonic(self):
        model = build_anharmonic_dipole(60, 1.0, 1.0, 0.0, 1.0, 1.0)
        rep = dipole_specialized(model, make_gauge("dipole"), lwl_mode(1.0, 1.0))
        assert rep.cross_check_residual <= 1e-10

    def test_wrong_gauge_guard(self):
        with pytest.raises(ArgumentError):
            coulomb_specialized(two_level(), make_gauge("dipole"), lwl_mode(1.0, 1.0))
        with pytest.raises(ArgumentError):
            dipole_specialized(two_level(), make_gauge("coulomb"), lwl_mode(1.0, 1.0))


class TestGaugeRelativityPair:
    def test_same_sweep_opposite_verdicts(self):
        # identical physical parameters: Coulomb-LWL never condenses while
        # the dipole gauge condenses above its analytic threshold
        n, v, w0 = 8, 1.0, 1.0
        mode = lwl_mode(1.0, v)
        d_c = np.sqrt(v * w0 / (2 * n))
        saw_condensed = False
        for d in np.linspace(0.0, 2.2 * d_c, 12):
            model = build_two_level_ensemble(n, w0, (0, d, 0), v)
            rep_c = evaluate(model, make_gauge("coulomb"), mode)
            rep_d = evaluate(model, make_gauge("dipole"), mode)
            assert not any(r.condensed for r in rep_c)
            if d > 1.0001 * d_c:
                assert rep_d[0].condensed
                saw_condensed = True
        assert saw_condensed

    def test_threshold_independent_of_mode_direction(self):
        from gaugecavity.gauge import mode_from_q
        model = build_two_level_ensemble(6, 1.0, (0, 0.4, 0), 1.0)
        rep_z = evaluate(model, make_gauge("dipole"), lwl_mode(1.0, 1.0))
        rep_x = evaluate(model, make_gauge("dipole"),
                         mode_from_q([1.0, 0.0, 0.0], 1.0))
        assert rep_x[0].lhs == pytest.approx(rep_z[0].lhs, rel=1e-12)
        assert rep_x[0].rhs == rep_z[0].rhs

    def test_alpha_margin_continuity(self):
        # margin curve from the Coulomb to the dipole endpoint has no jumps
        # beyond the grid-resolved Lipschitz bound; endpoints match presets
        n, d, v = 8, 0.5, 1.0
        model = build_two_level_ensemble(n, 1.0, (0, d, 0), v)
        mode = lwl_mode(1.0, v)
        alphas = np.linspace(0.0, 1.0, 21)
        margins = [evaluate(model, make_gauge("alpha_lwl", alpha=a), mode)[0].margin
                   for a in alphas]
        m_c = evaluate(model, make_gauge("coulomb"), mode)[0].margin
        m_d = evaluate(model, make_gauge("dipole"), mode)[0].margin
        assert margins[0] == pytest.approx(m_c, abs=1e-12)
        assert margins[-1] == pytest.approx(m_d, abs=1e-12)
        assert margins[0] < 0 < margins[-1]
        jumps = np.abs(np.diff(margins))
        scale = (max(margins) - min(margins))
        assert np.max(jumps) <= 0.25 * scale


class TestOrderParameter:
    def test_ring_ground_state_zero(self):
        model = build_ring_lattice(6, 1.0, 1.0)
        gauge = make_gauge("coulomb", lwl=False)
        mode = ring_mode(model, 1)
        spec = matter_spectrum(model)
        block = diagonalize_block(diamagnetic_D(model, gauge, mode), mode.nu)
        f_ops = tuple(coupling_f(model, gauge, mode, s) for s in (1, 2))
        g_ops = coupling_g(block, f_ops)
        beta = order_parameter(spec, block, g_ops[0], mode, "+")
        assert abs(beta) <= 1e-10

    def test_zero_coupling_zero(self):
        model = build_two_level_ensemble(3, 1.0, (0, 0, 0), 1.0)
        gauge = make_gauge("dipole")
        mode = lwl_mode(1.0, 1.0)
        spec = matter_spectrum(model)
        block = diagonalize_block(diamagnetic_D(model, gauge, mode), mode.nu)
        f_ops = tuple(coupling_f(model, gauge, mode, s) for s in (1, 2))
        g_ops = coupling_g(block, f_ops)
        assert order_parameter(spec, block, g_ops[0], mode, "+") == 0.0

    def test_symmetry_broken_state_matches_contraction(self):
        model = two_level(1, 0.3)
        gauge = make_gauge("dipole")
        mode = lwl_mode(1.0, 1.0)
        spec = matter_spectrum(model)
        block = diagonalize_block(diamagnetic_D(model, gauge, mode), mode.nu)
        f_ops = tuple(coupling_f(model, gauge, mode, s) for s in (1, 2))
        g_ops = coupling_g(block, f_ops)
        psi = (spec.vectors[:, 0] + spec.vectors[:, 1]) / np.sqrt(2)
        beta = order_parameter_from_vector(psi, block, g_ops[0], mode, 0)
        explicit = -(mode.amplitude / block.nu_tau[0]) * (
            psi.conj() @ g_ops[0].entries @ psi)
        assert beta == pytest.approx(complex(explicit), abs=1e-14)
        assert abs(beta) > 1e-3


class TestDisplacedEnergy:
    def test_vacuum_energy(self):
        assert displaced_energy(0.0, np.array([1.0]), [0.0], [0]) == 0.5

    def test_displaced_vacuum(self):
        assert displaced_energy(0.0, np.array([1.0]), [0.5], [0]) == 0.25

    def test_occupied(self):
        assert displaced_energy(0.0, np.array([1.0]), [0.0], [2]) == 2.5

    def test_block_form(self):
        block = diagonalize_block(
            diamagnetic_D(two_level(), make_gauge("dipole"), lwl_mode(1.0, 1.0)),
            1.0)
        val = displaced_energy(1.5, block, [0.0, 0.0], [0, 0])
        assert val == pytest.approx(1.5 + 1.0, abs=1e-14)

    def test_occupation_guard(self):
        with pytest.raises(ArgumentError):
            displaced_energy(0.0, np.array([1.0]), [0.0], [0.5])
        with pytest.raises(ArgumentError):
            displaced_energy(0.0, np.array([1.0]), [0.0], [-1])


class TestStiffnessEnergy:
    def _setup(self, d=0.25):
        model = two_level(4, d)
        gauge = make_gauge("dipole")
        mode = lwl_mode(1.0, 1.0)
        spec = gauge_spectrum(model, gauge, [mode])
        block = diagonalize_block(diamagnetic_D(model, gauge, mode), mode.nu)
        f_ops = tuple(coupling_f(model, gauge, mode, s) for s in (1, 2))
        return spec, mode, block, f_ops

    def test_zero_displacement(self):
        spec, mode, block, f_ops = self._setup()
        res = stiffness_energy(spec, mode, block, [0.0, 0.0], f_ops)
        assert res.energy == spec.ground_energy()
        assert res.energy_increase == 0.0

    def test_exact_quadratic_scaling(self):
        spec, mode, block, f_ops = self._setup()
        e1 = stiffness_energy(spec, mode, block, [0.01j, 0.0], f_ops)
        e2 = stiffness_energy(spec, mode, block, [0.02j, 0.0], f_ops)
        assert e2.energy_increase == pytest.approx(4 * e1.energy_increase, rel=1e-12)

    def test_energy_increase_positive(self):
        spec, mode, block, f_ops = self._setup()
        res = stiffness_energy(spec, mode, block, [0.01j, 0.0], f_ops)
        assert res.energy_increase > 0
        assert res.chi_ff_branch[0] < 0

    def test_uncoupled_branch_is_singular(self):
        # the '-' branch of the axis-aligned model has no response at all
        from gaugecavity.errors import SingularConstraintError
        spec, mode, block, f_ops = self._setup()
        with pytest.raises(SingularConstraintError):
            stiffness_energy(spec, mode, block, [0.0, 0.01j], f_ops)
