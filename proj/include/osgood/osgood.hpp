#pragma once

#include "osgood/error.hpp"
#include "osgood/growth.hpp"
#include "osgood/field.hpp"
#include "osgood/kfunc.hpp"
#include "osgood/spaces.hpp"
#include "osgood/littlewood_paley.hpp"
#include "osgood/biot_savart.hpp"
#include "osgood/flow.hpp"
#include "osgood/example_fields.hpp"
