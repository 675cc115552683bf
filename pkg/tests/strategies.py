from pathlib import Path

from hypothesis import strategies as st

from drshadow import CantorPoint, Nat

GOLDEN = Path(__file__).parent / 'golden'

bits = st.text(alphabet='01', max_size=6)
periods = st.text(alphabet='01', min_size=1, max_size=4)
cantor_points = st.builds(CantorPoint, bits, periods)
nat_points = st.integers(min_value=0, max_value=40).map(Nat)
