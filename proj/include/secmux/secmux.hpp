#pragma once

#include "secmux/channel.hpp"
#include "secmux/common.hpp"
#include "secmux/gf.hpp"
#include "secmux/hash_family.hpp"
#include "secmux/info.hpp"
#include "secmux/layout.hpp"
#include "secmux/privacy_amplification.hpp"
#include "secmux/rational.hpp"
#include "secmux/regions.hpp"
#include "secmux/simulator.hpp"
