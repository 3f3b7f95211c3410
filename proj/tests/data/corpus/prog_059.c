#include <stdio.h>
int blend(int n, int y)
{
    int limit = 0;
    int pos = 1;
    while (pos <= n) {
        if (pos % y == 0)
            limit++;
        pos++;
    }
    return limit;
}
int main(void)
{
    int n = 63;
    int y = 2;
    int limit = blend(n, y);
    printf("%d\n", limit);
    return 0;
}
