#pragma once

// Umbrella header.

#include "pellsha/error.hpp"
#include "pellsha/arith.hpp"
#include "pellsha/form.hpp"
#include "pellsha/qfield.hpp"
#include "pellsha/bqf.hpp"
#include "pellsha/conic.hpp"
#include "pellsha/sha.hpp"
#include "pellsha/oracle.hpp"
