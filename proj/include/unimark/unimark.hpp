#pragma once

#include "unimark/alternation.hpp"
#include "unimark/ecc.hpp"
#include "unimark/erasure_sim.hpp"
#include "unimark/harness.hpp"
#include "unimark/registry.hpp"
#include "unimark/scheme.hpp"
#include "unimark/stego.hpp"
#include "unimark/stego_frontend.hpp"
#include "unimark/utf8.hpp"
#include "unimark/whitemark.hpp"
