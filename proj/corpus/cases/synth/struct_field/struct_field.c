/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <string.h>
#include <tee_internal_api.h>

#define MSG_TYPE_MAX 7

struct msg_req {
    uint32_t type;
    uint32_t payload_len;
    uint8_t payload[256];
};

static int handle_msg(const struct msg_req *req)
{
    uint8_t payload[48];

    if (req->type > MSG_TYPE_MAX)
        return -1;
    memcpy(payload, req->payload, req->payload_len);
    return 0;
}
