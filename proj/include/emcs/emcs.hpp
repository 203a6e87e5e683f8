#pragma once

#include "equilibrium.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "logic.hpp"
#include "minimal_change.hpp"
#include "parser.hpp"
#include "system.hpp"
