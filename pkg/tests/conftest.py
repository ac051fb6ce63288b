import pytest

from wpclink.analysis import SystemParams
from wpclink.channel import NakagamiLink, effective
from wpclink.scenario import mean_gain, table1_defaults

_LB, TABLE_EH, TABLE_THETA, TABLE_SIGMA2 = table1_defaults()
TABLE_MU1 = mean_gain(_LB, "downlink")
TABLE_MU2 = mean_gain(_LB, "uplink")


def make_params(pt=0.5, m1=2, n1=1, m2=2, n2=1, tau=0.5, rate=5.0,
                mu1=TABLE_MU1, mu2=TABLE_MU2, sigma2=TABLE_SIGMA2,
                theta=TABLE_THETA, eh=TABLE_EH):
    """Link description on the default measurement scenario unless overridden."""
    return SystemParams(
        p_t=pt, tau=tau, rate=rate, sigma2=sigma2, theta=theta,
        dl=effective(NakagamiLink(m1, n1, mu1)),
        ul=effective(NakagamiLink(m2, n2, mu2)), eh=eh)


@pytest.fixture
def table_params():
    return make_params()
