import re
import xml.etree.ElementTree as ET

import pytest

from distavoid import FSpec, NormSpec, build
from distavoid.errors import ConfigError
from distavoid.render import render

SVG = "{http://www.w3.org/2000/svg}"


def test_1d_worked_example(worked_1d):
    svg = render(worked_1d)
    root = ET.fromstring(svg)
    assert root.tag == SVG + "svg" and root.get("version") == "1.1"
    assert svg.count('class="interval"') == 26
    assert len(root.findall(f"{SVG}line[@class='avoided']")) == 2


def test_2d_layers(euclid_2d):
    root = ET.fromstring(render(euclid_2d, stage=1))
    avoided = root.findall(f"{SVG}polygon[@class='avoided']")
    assert [p.get("data-stage") for p in avoided] == ["1", "2", "3"]
    assert len(root.findall(f"{SVG}rect[@class='cube']")) == 1
    # 65^2 centers exceed the default cap, so every 2nd center per axis is drawn
    assert len(root.findall(f"{SVG}polygon[@class='ball']")) == 33 * 33
    full = ET.fromstring(render(euclid_2d, stage=1, max_marks=5000))
    assert len(full.findall(f"{SVG}polygon[@class='ball']")) == 65 * 65


def test_ball_cap(euclid_2d):
    root = ET.fromstring(render(euclid_2d, stage=2, max_marks=400))
    assert 0 < len(root.findall(f"{SVG}polygon[@class='ball']")) <= 441
    assert "subsampled" in render(euclid_2d, stage=2, max_marks=400)


def test_deterministic_and_finite(euclid_2d):
    a = render(euclid_2d, 2)
    assert a == render(euclid_2d, 2)
    assert not re.search(r"nan|inf", a)


def test_other_norms_render():
    m = build(2, NormSpec.l1(2), FSpec.parse("inv_poly:1"), 1)
    ET.fromstring(render(m))


def test_bad_inputs(euclid_2d):
    m3 = build(3, NormSpec.l2(3), FSpec.parse("inv_poly:1"), 1)
    with pytest.raises(ConfigError):
        render(m3)
    with pytest.raises(ConfigError):
        render(euclid_2d, stage=4)
