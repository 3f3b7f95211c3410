#include <stdio.h>
int calc(int n)
{
    int total = 0;
    int cur;
    for (cur = 0; cur < n; cur++) {
        total = total * cur;
    }
    return total;
}
int main(void)
{
    int n = 36;
    int cur = calc(n);
    printf("%d\n", cur);
    return 0;
}
