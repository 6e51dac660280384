/** Entry point: pick the API base from the ?api= query parameter (same
 * origin by default) and mount the review page.
 */

import { ApiClient } from "./api.js";
import { createApp } from "./view.js";

const base = new URLSearchParams(window.location.search).get("api") ?? "";
const root = document.getElementById("app");
if (root === null) throw new Error("missing #app container");
createApp(root, new ApiClient(base));
