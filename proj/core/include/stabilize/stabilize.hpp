#pragma once

#include "stabilize/algebra.hpp"
#include "stabilize/banach.hpp"
#include "stabilize/colimit.hpp"
#include "stabilize/errors.hpp"
#include "stabilize/group.hpp"
#include "stabilize/io.hpp"
#include "stabilize/linear_map.hpp"
#include "stabilize/measure.hpp"
#include "stabilize/representation.hpp"
#include "stabilize/stabilization.hpp"
