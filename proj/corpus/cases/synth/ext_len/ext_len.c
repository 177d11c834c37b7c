/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>
#include "proto_layout.h"

void read_frame(TEE_Param params[4])
{
    uint8_t frame[128];

    TEE_MemMove(frame, params[0].memref.buffer, FRAME_LEN(params));
}
