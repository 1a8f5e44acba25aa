#pragma once

#include "bilaurent.hpp"
#include "bracket.hpp"
#include "diagram.hpp"
#include "errors.hpp"
#include "homology.hpp"
#include "integer.hpp"
#include "matrix.hpp"
#include "moves.hpp"
#include "net.hpp"
#include "ratfunc.hpp"
#include "refined.hpp"
#include "rewrite.hpp"
#include "sketch.hpp"
#include "spin.hpp"
#include "twist.hpp"
