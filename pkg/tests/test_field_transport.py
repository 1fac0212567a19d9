import numpy as np
import pytest

from enrda.assimilation import SinkhornSettings, couple_fields, field_transport_analysis
from enrda.assimilation.field_transport import _deposit_bilinear
from enrda.dynamics import AdvectionDiffusionParams, gaussian_blob


def grid_params(spacing=0.5, extent=12.0):
    return AdvectionDiffusionParams(
        (0.0, 0.0), (0.0, 0.0), (spacing, spacing), 1.0, (extent, extent)
    )


class TestBilinearDeposit:
    def test_atom_on_cell_center_stays_there(self):
        params = grid_params()
        axes = params.axes()
        grid = _deposit_bilinear(
            np.array([[axes[0][3], axes[1][5]]]), np.array([2.0]), axes
        )
        assert grid[3, 5] == pytest.approx(2.0)
        assert grid.sum() == pytest.approx(2.0)

    def test_midpoint_atom_splits_evenly(self):
        params = grid_params()
        axes = params.axes()
        mid = 0.5 * (axes[0][3] + axes[0][4])
        grid = _deposit_bilinear(np.array([[mid, axes[1][2]]]), np.array([1.0]), axes)
        assert grid[3, 2] == pytest.approx(0.5)
        assert grid[4, 2] == pytest.approx(0.5)

    def test_total_mass_preserved(self):
        params = grid_params()
        axes = params.axes()
        rng = np.random.default_rng(0)
        points = np.column_stack(
            [rng.uniform(1.0, 11.0, size=40), rng.uniform(1.0, 11.0, size=40)]
        )
        weights = rng.uniform(0.1, 1.0, size=40)
        grid = _deposit_bilinear(points, weights, axes)
        assert grid.sum() == pytest.approx(weights.sum())


class TestFieldTransport:
    def setup_fields(self):
        params = grid_params()
        background = gaussian_blob(params, 10.0, [8.0, 8.0], [1.0, 1.0]).values
        observation = gaussian_blob(params, 6.0, [4.0, 4.0], [1.5, 1.5]).values
        return params, background, observation

    def test_endpoints_recover_inputs(self):
        params, background, observation = self.setup_fields()
        axes = params.axes()
        settings = SinkhornSettings(max_iterations=2000)
        at_zero, _ = field_transport_analysis(
            background, observation, axes, eta=0.0, gamma=0.05, settings=settings
        )
        assert at_zero.sum() == pytest.approx(observation.sum(), rel=1e-6)
        # eta = 0 deposits the observation histogram back onto its own cells
        assert np.max(np.abs(at_zero - observation)) <= 0.05 * observation.max()
        at_one, _ = field_transport_analysis(
            background, observation, axes, eta=1.0, gamma=0.05, settings=settings
        )
        assert at_one.sum() == pytest.approx(background.sum(), rel=1e-6)
        assert np.max(np.abs(at_one - background)) <= 0.05 * background.max()

    def test_mass_interpolates_linearly(self):
        params, background, observation = self.setup_fields()
        axes = params.axes()
        coupling = couple_fields(
            background, observation, axes, gamma=0.05,
            settings=SinkhornSettings(max_iterations=2000),
        )
        for eta in (0.25, 0.5, 0.75):
            analysis, info = field_transport_analysis(
                background, observation, axes, eta=eta, gamma=0.05, coupling=coupling
            )
            expected = eta * background.sum() + (1 - eta) * observation.sum()
            assert analysis.sum() == pytest.approx(expected, rel=1e-9)
            assert info["eta"] == eta

    def test_mass_center_translates_with_eta(self):
        params, background, observation = self.setup_fields()
        axes = params.axes()
        coupling = couple_fields(
            background, observation, axes, gamma=0.05,
            settings=SinkhornSettings(max_iterations=2000),
        )
        mesh = np.meshgrid(*axes, indexing="ij")

        def center(field):
            weights = field / field.sum()
            return np.array([float((weights * m).sum()) for m in mesh])

        centers = [
            center(field_transport_analysis(
                background, observation, axes, eta=eta, gamma=0.05, coupling=coupling
            )[0])
            for eta in (0.0, 0.5, 1.0)
        ]
        # the analysis mass center walks the segment between the inputs
        expected_mid = 0.5 * (centers[0] + centers[2])
        np.testing.assert_allclose(centers[1], expected_mid, atol=0.05)
        assert centers[2][0] > centers[1][0] > centers[0][0]

    def test_empty_field_rejected(self):
        params, background, _ = self.setup_fields()
        with pytest.raises(ValueError, match="no mass"):
            field_transport_analysis(
                background, np.zeros_like(background), params.axes(),
                eta=0.5, gamma=0.05,
            )
