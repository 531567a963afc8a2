import { Studio } from "./app";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");
new Studio(root, apiBase);
