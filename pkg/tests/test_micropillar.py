import numpy as np
import pytest

from sshemit.micropillar import (
    MATERIAL_LINEWIDTHS,
    CavityParams,
    PillarGeometry,
    potential_1d,
    solve_cavity_coupled,
    solve_double_well,
    sweep_pillars,
    write_intensity_csv,
    write_pillar_csv,
)

BOUND = dict(well_depth=18.0, well_diameter=10.0, center_separation=15.0, m_eff=0.2)


class TestGeometry:
    def test_validation(self):
        with pytest.raises(ValueError):
            PillarGeometry(well_depth=-1.0)
        with pytest.raises(ValueError):
            PillarGeometry(grid_spacing=2.0)   # coarser than diameter/10
        with pytest.raises(ValueError):
            PillarGeometry(domain_size=10.0)
        with pytest.raises(ValueError):
            PillarGeometry(dimension=3)

    def test_auto_domain_has_decay_room(self):
        g = PillarGeometry(**BOUND)
        assert g.extent >= g.minimum_domain

    def test_potential_profile(self):
        g = PillarGeometry(**BOUND)
        x = np.linspace(-g.extent / 2, g.extent / 2, 2001)
        v = potential_1d(g, x)
        assert v.min() == -18.0
        assert v[0] == 0.0 and v[-1] == 0.0
        # two wells of the right total footprint
        filled = np.sum(v < 0) * (x[1] - x[0])
        assert filled == pytest.approx(2 * 10.0, rel=0.02)


class TestDoubleWell1D:
    def test_bound_doublet(self):
        est = solve_double_well(PillarGeometry(**BOUND))
        assert est.e0 < est.e1 < 0
        assert est.doublet_bound
        assert est.j_sys == pytest.approx((est.e1 - est.e0) / 2, rel=1e-14)

    def test_far_wells_degenerate(self):
        est = solve_double_well(PillarGeometry(
            well_depth=18.0, well_diameter=10.0, center_separation=70.0, m_eff=0.2))
        assert est.j_sys < 1e-3

    def test_parity_of_doublet(self):
        est = solve_double_well(PillarGeometry(**BOUND), return_states=True)
        g, e = est.ground, est.excited
        # probability densities are mirror symmetric; the amplitude parity
        # shows up as a node count of 0 / 1 at the midplane
        np.testing.assert_allclose(g, g[::-1], atol=1e-8 * g.max())
        np.testing.assert_allclose(e, e[::-1], atol=1e-8 * e.max())
        mid = len(e) // 2
        assert e[mid] < 1e-6 * e.max()   # odd state has a node
        assert g[mid] > 0.3 * g.max()    # even state does not

    def test_grid_convergence(self):
        a = solve_double_well(PillarGeometry(**BOUND, grid_spacing=0.5)).j_sys
        b = solve_double_well(PillarGeometry(**BOUND, grid_spacing=0.25)).j_sys
        assert abs(a - b) / b < 0.02

    def test_domain_convergence(self):
        g = PillarGeometry(**BOUND)
        a = solve_double_well(g).j_sys
        b = solve_double_well(PillarGeometry(**BOUND, domain_size=1.5 * g.extent)).j_sys
        assert abs(a - b) / b < 0.01

    def test_ground_energy_cauchy_under_refinement(self):
        energies = [solve_double_well(PillarGeometry(**BOUND, grid_spacing=h)).e0
                    for h in (1.0, 0.5, 0.25)]
        assert abs(energies[1] - energies[2]) < 1e-2
        assert abs(energies[1] - energies[2]) < abs(energies[0] - energies[1])

    def test_shallow_wells_flagged_unbound(self):
        est = solve_double_well(PillarGeometry(
            well_depth=10.0, well_diameter=10.0, center_separation=15.0, m_eff=0.05))
        assert not est.doublet_bound


class TestTrends:
    def test_separation_decreasing(self):
        js = [solve_double_well(PillarGeometry(
            well_depth=18.0, well_diameter=10.0, center_separation=s, m_eff=0.2)).j_sys
            for s in (10.0, 12.5, 15.0, 20.0)]
        assert all(a > b for a, b in zip(js, js[1:])), js

    def test_mass_decreasing(self):
        js = [solve_double_well(PillarGeometry(
            well_depth=10.0, well_diameter=10.0, center_separation=15.0, m_eff=m)).j_sys
            for m in (0.1, 0.2, 0.3, 0.5)]
        assert all(a > b for a, b in zip(js, js[1:])), js

    def test_depth_trend_flips_with_separation(self):
        depths = (10.0, 18.0, 28.0)

        def run(sep):
            return [solve_double_well(PillarGeometry(
                well_depth=d, well_diameter=10.0, center_separation=sep,
                m_eff=0.2)).j_sys for d in depths]

        close = run(10.0)
        far = run(15.0)
        assert close[0] < close[1] < close[2], close
        assert far[0] > far[1] > far[2], far


class TestDoubleWell2D:
    GEOMETRY = dict(well_depth=28.0, well_diameter=10.0, center_separation=15.0,
                    m_eff=0.5, dimension=2)

    def test_bound_doublet_and_mirror_symmetry(self):
        est = solve_double_well(PillarGeometry(**self.GEOMETRY), return_states=True)
        assert est.doublet_bound
        assert est.j_sys > 0
        np.testing.assert_allclose(est.ground, est.ground[::-1, :],
                                   atol=1e-6 * est.ground.max())

    def test_separation_decreasing(self):
        base = dict(self.GEOMETRY)
        js = []
        for s in (12.0, 16.0):
            base["center_separation"] = s
            js.append(solve_double_well(PillarGeometry(**base)).j_sys)
        assert js[0] > js[1]


class TestCavity:
    def test_zero_coupling_reduction(self):
        g = PillarGeometry(well_depth=18.0, well_diameter=10.0,
                           center_separation=15.0, m_eff=0.05)
        plain = solve_double_well(g)
        coupled = solve_cavity_coupled(g, CavityParams(delta=0.0))
        assert coupled.j_sys == pytest.approx(plain.j_sys, rel=1e-9)
        assert coupled.e0 == pytest.approx(plain.e0, rel=1e-9)

    def test_monotone_in_coupling(self):
        g = PillarGeometry(well_depth=18.0, well_diameter=10.0,
                           center_separation=15.0, m_eff=0.05)
        js = [solve_cavity_coupled(g, CavityParams(delta=d, m_c=1e-4)).j_sys
              for d in (0.0, 2.0, 4.0, 8.0)]
        assert all(a < b for a, b in zip(js, js[1:])), js

    def test_mass_ordering_enforced(self):
        g = PillarGeometry(**BOUND)
        with pytest.raises(ValueError):
            solve_cavity_coupled(g, CavityParams(delta=1.0, m_c=0.5))
        with pytest.raises(ValueError):
            CavityParams(delta=-1.0)


class TestSweeps:
    def test_rows_and_ratios(self, tmp_path):
        g = PillarGeometry(**BOUND)
        rows = sweep_pillars("depth", [14.0, 18.0], g)
        assert [r.value for r in rows] == [14.0, 18.0]
        for r in rows:
            for mat, gamma in MATERIAL_LINEWIDTHS.items():
                assert r.ratios[mat] == pytest.approx(r.j_sys / gamma, rel=1e-12)
        path = tmp_path / "sweep.csv"
        write_pillar_csv(path, rows)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "value,j_sys_meV,material,gamma_qd_meV,ratio"
        assert len(lines) == 1 + 2 * 3

    def test_unknown_variable(self):
        with pytest.raises(ValueError):
            sweep_pillars("bogus", [1.0], PillarGeometry(**BOUND))

    def test_intensity_csv(self, tmp_path):
        est = solve_double_well(PillarGeometry(**BOUND), return_states=True)
        path = tmp_path / "map.csv"
        write_intensity_csv(path, est, "ground")
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x_nm,y_nm,psi_sq"
        assert len(lines) == 1 + est.ground.size
