#pragma once

#include "gpc/channel.hpp"
#include "gpc/classical.hpp"
#include "gpc/divisibility.hpp"
#include "gpc/errors.hpp"
#include "gpc/fixtures.hpp"
#include "gpc/mixture.hpp"
#include "gpc/mub.hpp"
#include "gpc/oracle.hpp"
#include "gpc/weight.hpp"
