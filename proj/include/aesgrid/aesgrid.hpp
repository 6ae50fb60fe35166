#pragma once

#include "aesgrid/block.hpp"
#include "aesgrid/cipher.hpp"
#include "aesgrid/dispatch.hpp"
#include "aesgrid/error.hpp"
#include "aesgrid/gf256.hpp"
#include "aesgrid/grid.hpp"
#include "aesgrid/kernel.hpp"
#include "aesgrid/kernels.hpp"
#include "aesgrid/key_schedule.hpp"
#include "aesgrid/modes.hpp"
#include "aesgrid/tables.hpp"
